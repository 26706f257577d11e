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

// Black-box policies: the auditor only ever calls act(state). Concrete
// policies are behaviour-cloned networks and the two evasion wrappers a
// suspect may hide behind (Gaussian action distortion and a sub-model
// ensemble that skips members trained on the queried trajectory).

#ifndef TRAJAUDIT_POLICY_H_
#define TRAJAUDIT_POLICY_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "trajaudit/data_model.h"
#include "trajaudit/neural.h"
#include "trajaudit/rng.h"

namespace trajaudit {

class RecordReader;

// Maps a state to an action in [-1, 1]^d_a (the dataset's normalized action
// space). Implementations are safe to call from several threads.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual Vector act(std::span<const double> state) const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t action_dim() const = 0;
  virtual const std::string& label() const = 0;
  // Writes the policy body (one "policy" descriptor record followed by its
  // payload); see save_policy for the file envelope.
  virtual void write(std::ostream& out) const = 0;
};

using PolicyPtr = std::shared_ptr<const Policy>;

struct PolicyNetConfig {
  std::vector<std::size_t> hidden = {32, 32};
  TrainConfig train{.epochs = 20, .batch_size = 64, .lr = 1e-3,
                    .lr_decay_every = 15, .seed = 0};
};

// Behaviour-cloned network with a tanh output layer.
class BcPolicy final : public Policy {
 public:
  BcPolicy(Mlp net, std::string label);

  Vector act(std::span<const double> state) const override;
  std::size_t state_dim() const override { return net_.input_size(); }
  std::size_t action_dim() const override { return net_.output_size(); }
  const std::string& label() const override { return label_; }
  void write(std::ostream& out) const override;

  const Mlp& net() const { return net_; }

 private:
  Mlp net_;
  std::string label_;
};

// Regresses normalized actions on states (MSE, train_regression). The
// network initialisation and minibatch order both derive from `seed`; the
// train seed in `config` is ignored.
PolicyPtr train_bc(const Dataset& dataset, const PolicyNetConfig& config,
                   std::uint64_t seed);

// k >= 2 behaviour-cloned policies with seeds base_seed .. base_seed + k - 1,
// trained in parallel.
std::vector<PolicyPtr> train_shadows(const Dataset& dataset, std::size_t k,
                                     const PolicyNetConfig& config,
                                     std::uint64_t base_seed);

// clip(inner(s) + N(0, sigma^2), -1, 1), one noise draw per action entry per
// query from a seeded stream. Queries are serialized on the stream, so
// results are reproducible whenever queries arrive in the same order.
class GaussianDistortedPolicy final : public Policy {
 public:
  GaussianDistortedPolicy(PolicyPtr inner, double sigma, std::uint64_t seed);

  Vector act(std::span<const double> state) const override;
  std::size_t state_dim() const override { return inner_->state_dim(); }
  std::size_t action_dim() const override { return inner_->action_dim(); }
  const std::string& label() const override { return label_; }
  void write(std::ostream& out) const override;

  double sigma() const { return sigma_; }
  const PolicyPtr& inner() const { return inner_; }

 private:
  PolicyPtr inner_;
  double sigma_;
  std::uint64_t seed_;
  std::string label_;
  mutable std::mutex mutex_;
  mutable Rng rng_;
};

PolicyPtr gaussian_distort(PolicyPtr inner, double sigma, std::uint64_t seed);

enum class EnsembleMode { kExcludeSource, kMeanAll };

std::string to_string(EnsembleMode mode);
EnsembleMode parse_ensemble_mode(const std::string& text);

// Sub-models trained on disjoint subsets of `source_dataset`. Plain act()
// averages every sub-model; act_for_source() applies the configured mode.
class EnsemblePolicy final : public Policy,
                             public std::enable_shared_from_this<EnsemblePolicy> {
 public:
  EnsemblePolicy(std::vector<PolicyPtr> members, MembershipMap membership,
                 EnsembleMode mode, std::string source_dataset);

  Vector act(std::span<const double> state) const override;
  std::size_t state_dim() const override { return members_.front()->state_dim(); }
  std::size_t action_dim() const override { return members_.front()->action_dim(); }
  const std::string& label() const override { return label_; }
  void write(std::ostream& out) const override;

  // Mean over the sub-models not trained on `source` (exclude-source mode);
  // falls back to all sub-models when that selection would be empty or the
  // id is not in the membership map.
  Vector act_for_source(std::span<const double> state, TrajectoryId source) const;
  // Which sub-models answer a query that originates from `source`.
  std::vector<std::size_t> selected_members(TrajectoryId source) const;

  // State-only view of the ensemble for queries drawn from trajectory
  // `source` of dataset `dataset`. Queries from any other dataset cannot be
  // members, so they see the mean of all sub-models.
  PolicyPtr bound_to(const std::string& dataset, TrajectoryId source) const;

  const std::vector<PolicyPtr>& members() const { return members_; }
  const MembershipMap& membership() const { return membership_; }
  EnsembleMode mode() const { return mode_; }
  const std::string& source_dataset() const { return source_dataset_; }

 private:
  Vector mean_of(std::span<const double> state,
                 const std::vector<std::size_t>& selection) const;

  std::vector<PolicyPtr> members_;
  MembershipMap membership_;
  EnsembleMode mode_;
  std::string source_dataset_;
  std::string label_;
};

std::shared_ptr<const EnsemblePolicy> ensemble_defended(
    std::vector<PolicyPtr> sub_policies, MembershipMap membership,
    EnsembleMode mode, std::string source_dataset);

// Splits `dataset` into `parts` subsets, trains one sub-model per subset
// (seeds base_seed + i) and wraps them.
std::shared_ptr<const EnsemblePolicy> train_ensemble(
    const Dataset& dataset, std::size_t parts, const PolicyNetConfig& config,
    std::uint64_t base_seed, std::uint64_t split_seed, EnsembleMode mode);

// What the auditor queries for a given audited trajectory. The defense side
// owns this mapping; the auditor still sees a state -> action black box.
using SuspectResolver = std::function<PolicyPtr(TrajectoryId)>;

SuspectResolver fixed_suspect(PolicyPtr policy);
// Routes each audited trajectory of `target_dataset` to the ensemble view
// bound to that trajectory.
SuspectResolver ensemble_suspect(std::shared_ptr<const EnsemblePolicy> ensemble,
                                 std::string target_dataset);

// File envelope: "trajaudit-policy 1" followed by the policy body. Bodies
// nest for wrappers:
//   policy bc <label>              + mlp records
//   policy gaussian <sigma> <seed> + inner body
//   policy ensemble <mode> <source dataset> <members> <membership entries>
//     member <trajectory id> <subset>   (one per entry)
//     + one body per sub-model
void save_policy(const Policy& policy, const std::filesystem::path& path);
PolicyPtr load_policy(const std::filesystem::path& path);
void write_policy(const Policy& policy, std::ostream& out);
PolicyPtr read_policy(std::istream& in, const std::string& source = "<stream>");
PolicyPtr read_policy_body(RecordReader& reader);

}  // namespace trajaudit

#endif  // TRAJAUDIT_POLICY_H_
