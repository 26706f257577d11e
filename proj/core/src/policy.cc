//
// Copyright 2026 The trajaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "trajaudit/policy.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "trajaudit/error.h"
#include "trajaudit/parallel.h"
#include "trajaudit/text_records.h"

namespace trajaudit {
namespace {

void check_state(const Policy& policy, std::span<const double> state) {
  if (state.size() != policy.state_dim()) {
    throw InvalidArgument("policy '" + policy.label() + "': state has " +
                          std::to_string(state.size()) + " entries, expected " +
                          std::to_string(policy.state_dim()));
  }
}

void check_label(const std::string& label) {
  if (label.empty() ||
      std::any_of(label.begin(), label.end(), [](unsigned char c) { return std::isspace(c); })) {
    throw InvalidArgument("policy label must be a non-empty token without spaces: '" +
                          label + "'");
  }
}

class BoundEnsemble final : public Policy {
 public:
  BoundEnsemble(std::shared_ptr<const EnsemblePolicy> ensemble, TrajectoryId source)
      : ensemble_(std::move(ensemble)), source_(source) {}

  Vector act(std::span<const double> state) const override {
    return ensemble_->act_for_source(state, source_);
  }
  std::size_t state_dim() const override { return ensemble_->state_dim(); }
  std::size_t action_dim() const override { return ensemble_->action_dim(); }
  const std::string& label() const override { return ensemble_->label(); }
  void write(std::ostream& out) const override { ensemble_->write(out); }

 private:
  std::shared_ptr<const EnsemblePolicy> ensemble_;
  TrajectoryId source_;
};

}  // namespace

BcPolicy::BcPolicy(Mlp net, std::string label)
    : net_(std::move(net)), label_(std::move(label)) {
  check_label(label_);
  if (net_.output_activation() != Activation::kTanh) {
    throw InvalidArgument("BcPolicy requires a tanh output layer");
  }
}

Vector BcPolicy::act(std::span<const double> state) const {
  check_state(*this, state);
  Eigen::VectorXd input(static_cast<Eigen::Index>(state.size()));
  for (std::size_t i = 0; i < state.size(); ++i) input(static_cast<Eigen::Index>(i)) = state[i];
  const Eigen::VectorXd output = net_.forward(input);
  return Vector(output.data(), output.data() + output.size());
}

void BcPolicy::write(std::ostream& out) const {
  out << "policy bc " << label_ << '\n';
  write_mlp(net_, out);
}

PolicyPtr train_bc(const Dataset& dataset, const PolicyNetConfig& config,
                   std::uint64_t seed) {
  const ValidationResult validation = validate_dataset(dataset);
  if (!validation.ok()) {
    throw InvalidArgument("train_bc: invalid dataset: " + validation.summary());
  }
  const Dataset normalized = normalize_actions(dataset).dataset;
  const auto n = static_cast<Eigen::Index>(normalized.transition_count());
  Eigen::MatrixXd states(static_cast<Eigen::Index>(normalized.state_dim), n);
  Eigen::MatrixXd actions(static_cast<Eigen::Index>(normalized.action_dim), n);
  Eigen::Index column = 0;
  for (const auto& trajectory : normalized.trajectories) {
    for (const auto& tr : trajectory.transitions) {
      states.col(column) = Eigen::Map<const Eigen::VectorXd>(
          tr.state.data(), static_cast<Eigen::Index>(tr.state.size()));
      actions.col(column) = Eigen::Map<const Eigen::VectorXd>(
          tr.action.data(), static_cast<Eigen::Index>(tr.action.size()));
      ++column;
    }
  }

  std::vector<std::size_t> sizes = {normalized.state_dim};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(normalized.action_dim);
  Mlp net(sizes, Activation::kTanh, derive_seed(seed, "init"));
  TrainConfig train = config.train;
  train.seed = derive_seed(seed, "minibatch");
  net = train_regression(std::move(net), states, actions, train);
  return std::make_shared<BcPolicy>(std::move(net),
                                    dataset.name + "/bc-" + std::to_string(seed));
}

std::vector<PolicyPtr> train_shadows(const Dataset& dataset, std::size_t k,
                                     const PolicyNetConfig& config,
                                     std::uint64_t base_seed) {
  if (k < 2) {
    throw InvalidArgument("train_shadows: need k >= 2 shadow models, got " +
                          std::to_string(k));
  }
  std::vector<PolicyPtr> shadows(k);
  parallel_for(k, [&](std::size_t i) {
    shadows[i] = train_bc(dataset, config, base_seed + i);
  });
  return shadows;
}

GaussianDistortedPolicy::GaussianDistortedPolicy(PolicyPtr inner, double sigma,
                                                 std::uint64_t seed)
    : inner_(std::move(inner)), sigma_(sigma), seed_(seed), rng_(seed) {
  if (!inner_) throw InvalidArgument("gaussian_distort: null inner policy");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("gaussian_distort: sigma must be >= 0");
  }
  label_ = inner_->label() + "+gauss" + format_shortest(sigma);
}

Vector GaussianDistortedPolicy::act(std::span<const double> state) const {
  Vector action = inner_->act(state);
  if (sigma_ == 0.0) return action;
  std::lock_guard lock(mutex_);
  for (double& a : action) a = std::clamp(a + sigma_ * rng_.normal(), -1.0, 1.0);
  return action;
}

void GaussianDistortedPolicy::write(std::ostream& out) const {
  out << "policy gaussian " << format_real(sigma_) << ' ' << seed_ << '\n';
  inner_->write(out);
}

PolicyPtr gaussian_distort(PolicyPtr inner, double sigma, std::uint64_t seed) {
  return std::make_shared<GaussianDistortedPolicy>(std::move(inner), sigma, seed);
}

std::string to_string(EnsembleMode mode) {
  return mode == EnsembleMode::kExcludeSource ? "exclude-source" : "mean-all";
}

EnsembleMode parse_ensemble_mode(const std::string& text) {
  if (text == "exclude-source") return EnsembleMode::kExcludeSource;
  if (text == "mean-all") return EnsembleMode::kMeanAll;
  throw InvalidArgument("unknown ensemble mode '" + text + "'");
}

EnsemblePolicy::EnsemblePolicy(std::vector<PolicyPtr> members,
                               MembershipMap membership, EnsembleMode mode,
                               std::string source_dataset)
    : members_(std::move(members)),
      membership_(std::move(membership)),
      mode_(mode),
      source_dataset_(std::move(source_dataset)) {
  if (members_.empty()) throw InvalidArgument("ensemble: empty sub-policy list");
  for (const auto& member : members_) {
    if (!member) throw InvalidArgument("ensemble: null sub-policy");
    if (member->state_dim() != members_.front()->state_dim() ||
        member->action_dim() != members_.front()->action_dim()) {
      throw InvalidArgument("ensemble: sub-policies disagree on dimensions");
    }
  }
  for (const auto& [id, subset] : membership_) {
    if (subset >= members_.size()) {
      throw InvalidArgument("ensemble: membership names subset " +
                            std::to_string(subset) + " of " +
                            std::to_string(members_.size()));
    }
  }
  label_ = "ensemble" + std::to_string(members_.size()) + "-" + to_string(mode_) +
           "/" + source_dataset_;
  check_label(label_);
}

Vector EnsemblePolicy::mean_of(std::span<const double> state,
                               const std::vector<std::size_t>& selection) const {
  check_state(*this, state);
  Vector mean(action_dim(), 0.0);
  for (std::size_t index : selection) {
    const Vector action = members_[index]->act(state);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += action[j];
  }
  for (double& v : mean) v /= static_cast<double>(selection.size());
  return mean;
}

std::vector<std::size_t> EnsemblePolicy::selected_members(TrajectoryId source) const {
  std::vector<std::size_t> selection;
  const auto it = membership_.find(source);
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (mode_ == EnsembleMode::kExcludeSource && it != membership_.end() &&
        it->second == i) {
      continue;
    }
    selection.push_back(i);
  }
  if (selection.empty()) {
    selection.resize(members_.size());
    for (std::size_t i = 0; i < members_.size(); ++i) selection[i] = i;
  }
  return selection;
}

Vector EnsemblePolicy::act(std::span<const double> state) const {
  std::vector<std::size_t> all(members_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return mean_of(state, all);
}

Vector EnsemblePolicy::act_for_source(std::span<const double> state,
                                      TrajectoryId source) const {
  return mean_of(state, selected_members(source));
}

PolicyPtr EnsemblePolicy::bound_to(const std::string& dataset,
                                   TrajectoryId source) const {
  auto self = shared_from_this();
  if (dataset != source_dataset_) return self;
  return std::make_shared<BoundEnsemble>(std::move(self), source);
}

void EnsemblePolicy::write(std::ostream& out) const {
  out << "policy ensemble " << to_string(mode_) << ' ' << source_dataset_ << ' '
      << members_.size() << ' ' << membership_.size() << '\n';
  for (const auto& [id, subset] : membership_) {
    out << "member " << id << ' ' << subset << '\n';
  }
  for (const auto& member : members_) member->write(out);
}

std::shared_ptr<const EnsemblePolicy> ensemble_defended(
    std::vector<PolicyPtr> sub_policies, MembershipMap membership,
    EnsembleMode mode, std::string source_dataset) {
  return std::make_shared<const EnsemblePolicy>(
      std::move(sub_policies), std::move(membership), mode, std::move(source_dataset));
}

std::shared_ptr<const EnsemblePolicy> train_ensemble(
    const Dataset& dataset, std::size_t parts, const PolicyNetConfig& config,
    std::uint64_t base_seed, std::uint64_t split_seed, EnsembleMode mode) {
  if (parts < 2) throw InvalidArgument("train_ensemble: need at least 2 subsets");
  DatasetSplit split = split_dataset(dataset, parts, split_seed);
  std::vector<PolicyPtr> members(parts);
  parallel_for(parts, [&](std::size_t i) {
    members[i] = train_bc(split.subsets[i], config, base_seed + i);
  });
  return ensemble_defended(std::move(members), std::move(split.membership), mode,
                           dataset.name);
}

SuspectResolver fixed_suspect(PolicyPtr policy) {
  if (!policy) throw InvalidArgument("fixed_suspect: null policy");
  return [policy = std::move(policy)](TrajectoryId) { return policy; };
}

SuspectResolver ensemble_suspect(std::shared_ptr<const EnsemblePolicy> ensemble,
                                 std::string target_dataset) {
  if (!ensemble) throw InvalidArgument("ensemble_suspect: null ensemble");
  return [ensemble = std::move(ensemble),
          target = std::move(target_dataset)](TrajectoryId source) {
    return ensemble->bound_to(target, source);
  };
}

void write_policy(const Policy& policy, std::ostream& out) {
  out << "trajaudit-policy 1\n";
  policy.write(out);
}

PolicyPtr read_policy_body(RecordReader& reader) {
  Record head = reader.expect("policy");
  if (head.size() < 2) reader.fail(head, "policy record without a kind");
  const std::string& kind = head.tokens[1];
  if (kind == "bc") {
    reader.expect_size(head, 3);
    Mlp net = read_mlp(reader);
    try {
      return std::make_shared<BcPolicy>(std::move(net), head.tokens[2]);
    } catch (const InvalidArgument& e) {
      reader.fail(head, e.what());
    }
  }
  if (kind == "gaussian") {
    reader.expect_size(head, 4);
    const double sigma = reader.real(head, 2);
    const std::uint64_t seed = reader.unsigned_integer(head, 3);
    PolicyPtr inner = read_policy_body(reader);
    return gaussian_distort(std::move(inner), sigma, seed);
  }
  if (kind == "ensemble") {
    reader.expect_size(head, 6);
    EnsembleMode mode = EnsembleMode::kMeanAll;
    try {
      mode = parse_ensemble_mode(head.tokens[2]);
    } catch (const InvalidArgument& e) {
      reader.fail(head, e.what());
    }
    const std::string source = head.tokens[3];
    const std::size_t count = reader.unsigned_integer(head, 4);
    const std::size_t entries = reader.unsigned_integer(head, 5);
    MembershipMap membership;
    for (std::size_t i = 0; i < entries; ++i) {
      Record member = reader.expect("member");
      reader.expect_size(member, 3);
      membership[reader.unsigned_integer(member, 1)] = reader.unsigned_integer(member, 2);
    }
    std::vector<PolicyPtr> members;
    for (std::size_t i = 0; i < count; ++i) members.push_back(read_policy_body(reader));
    try {
      return ensemble_defended(std::move(members), std::move(membership), mode, source);
    } catch (const InvalidArgument& e) {
      reader.fail(head, e.what());
    }
  }
  reader.fail(head, "unknown policy kind '" + kind + "'");
}

PolicyPtr read_policy(std::istream& in, const std::string& source) {
  RecordReader reader(in, source);
  Record magic = reader.expect("trajaudit-policy");
  reader.expect_size(magic, 2);
  if (reader.unsigned_integer(magic, 1) != 1) reader.fail(magic, "unsupported policy version");
  PolicyPtr policy = read_policy_body(reader);
  if (auto extra = reader.next()) reader.fail(*extra, "trailing record after policy");
  return policy;
}

void save_policy(const Policy& policy, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_policy(policy, out);
  if (!out) throw Error("failed writing " + path.string());
}

PolicyPtr load_policy(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw NotFound("policy not found: " + path.string());
  std::ifstream in(path);
  if (!in) throw NotFound("policy not found: " + path.string());
  return read_policy(in, path.string());
}

}  // namespace trajaudit
