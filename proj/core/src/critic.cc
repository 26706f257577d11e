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

#include "trajaudit/critic.h"

#include <cmath>
#include <fstream>
#include <ostream>

#include "trajaudit/error.h"
#include "trajaudit/rng.h"
#include "trajaudit/text_records.h"

namespace trajaudit {
namespace {

// Column layout of a critic input: state entries, then action entries.
void fill_input(Eigen::MatrixXd& inputs, Eigen::Index column,
                std::span<const double> state, std::span<const double> action) {
  Eigen::Index row = 0;
  for (double v : state) inputs(row++, column) = v;
  for (double v : action) inputs(row++, column) = v;
}

struct TrainingSet {
  Eigen::MatrixXd inputs;       // (d_s + d_a) x N
  Eigen::MatrixXd next_inputs;  // (d_s + d_a) x N, unused where !bootstrap
  Eigen::VectorXd rewards;      // TD: r_t; MC: G_t
  std::vector<bool> bootstrap;
  std::size_t dropped = 0;
};

TrainingSet build_training_set(const Dataset& dataset, const CriticConfig& config) {
  const std::size_t width = dataset.state_dim + dataset.action_dim;
  std::vector<std::pair<const Trajectory*, std::size_t>> used;
  TrainingSet set;
  for (const auto& trajectory : dataset.trajectories) {
    const bool complete = trajectory.transitions.back().terminal;
    if (config.mode == CriticMode::kMonteCarlo && !complete) {
      throw InvalidArgument(
          "train_critic: Monte-Carlo targets need complete trajectories, but "
          "trajectory " + std::to_string(trajectory.id) + " is truncated");
    }
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
      const bool last = t + 1 == trajectory.size();
      if (config.mode == CriticMode::kTemporalDifference && last && !complete) {
        ++set.dropped;
        continue;
      }
      used.emplace_back(&trajectory, t);
    }
  }
  if (used.empty()) throw InvalidArgument("train_critic: no usable transitions");

  const auto n = static_cast<Eigen::Index>(used.size());
  const auto rows = static_cast<Eigen::Index>(width);
  set.inputs = Eigen::MatrixXd::Zero(rows, n);
  set.next_inputs = Eigen::MatrixXd::Zero(rows, n);
  set.rewards = Eigen::VectorXd::Zero(n);
  set.bootstrap.assign(used.size(), false);

  const Trajectory* returns_owner = nullptr;
  std::vector<double> returns;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [trajectory, t] = used[static_cast<std::size_t>(i)];
    const Transition& tr = trajectory->transitions[t];
    fill_input(set.inputs, i, tr.state, tr.action);
    if (config.mode == CriticMode::kMonteCarlo) {
      if (returns_owner != trajectory) {
        returns = mc_returns(*trajectory, config.gamma);
        returns_owner = trajectory;
      }
      set.rewards(i) = returns[t];
      continue;
    }
    set.rewards(i) = tr.reward;
    if (!tr.terminal) {
      const Transition& next = trajectory->transitions[t + 1];
      fill_input(set.next_inputs, i, tr.next_state, next.action);
      set.bootstrap[static_cast<std::size_t>(i)] = true;
    }
  }
  return set;
}

Eigen::MatrixXd compute_targets(const TrainingSet& set, const Mlp& target_net,
                                const CriticConfig& config) {
  Eigen::MatrixXd targets = set.rewards.transpose();
  if (config.mode == CriticMode::kMonteCarlo) return targets;
  const Eigen::MatrixXd next_q = target_net.forward_batch(set.next_inputs);
  for (Eigen::Index i = 0; i < targets.cols(); ++i) {
    if (set.bootstrap[static_cast<std::size_t>(i)]) {
      targets(0, i) += config.gamma * next_q(0, i);
    }
  }
  return targets;
}

}  // namespace

std::string to_string(CriticMode mode) {
  return mode == CriticMode::kTemporalDifference ? "td" : "mc";
}

CriticMode parse_critic_mode(const std::string& text) {
  if (text == "td") return CriticMode::kTemporalDifference;
  if (text == "mc") return CriticMode::kMonteCarlo;
  throw InvalidArgument("unknown critic mode '" + text + "' (expected td or mc)");
}

void CriticConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidArgument("critic: gamma must lie in [0, 1]");
  }
  if (target_sync_period == 0) throw InvalidArgument("critic: target_sync_period must be >= 1");
  if (batch_size == 0) throw InvalidArgument("critic: batch_size must be >= 1");
  if (!(lr > 0.0)) throw InvalidArgument("critic: lr must be > 0");
}

std::vector<double> mc_returns(const Trajectory& trajectory, double gamma) {
  std::vector<double> returns(trajectory.size());
  double running = 0.0;
  for (std::size_t t = trajectory.size(); t-- > 0;) {
    running = trajectory.transitions[t].reward + gamma * running;
    returns[t] = running;
  }
  return returns;
}

Critic::Critic(Mlp net, CriticConfig config, std::size_t state_dim,
               std::size_t action_dim)
    : net_(std::move(net)),
      config_(std::move(config)),
      state_dim_(state_dim),
      action_dim_(action_dim) {
  if (net_.input_size() != state_dim + action_dim || net_.output_size() != 1) {
    throw InvalidArgument("critic network must map d_s + d_a inputs to one output");
  }
}

double Critic::evaluate(std::span<const double> state,
                        std::span<const double> action) const {
  if (state.size() != state_dim_ || action.size() != action_dim_) {
    throw InvalidArgument("critic: state/action shape mismatch");
  }
  Eigen::VectorXd input(static_cast<Eigen::Index>(state_dim_ + action_dim_));
  Eigen::Index row = 0;
  for (double v : state) input(row++) = v;
  for (double v : action) input(row++) = v;
  return net_.forward(input)(0);
}

Eigen::VectorXd Critic::evaluate_batch(const Eigen::MatrixXd& states,
                                       const Eigen::MatrixXd& actions) const {
  if (static_cast<std::size_t>(states.rows()) != state_dim_ ||
      static_cast<std::size_t>(actions.rows()) != action_dim_ ||
      states.cols() != actions.cols()) {
    throw InvalidArgument("critic: batch shape mismatch");
  }
  // Column-by-column so batch results are bit-identical to single queries.
  Eigen::VectorXd q(states.cols());
  Eigen::VectorXd input(states.rows() + actions.rows());
  for (Eigen::Index i = 0; i < states.cols(); ++i) {
    input.head(states.rows()) = states.col(i);
    input.tail(actions.rows()) = actions.col(i);
    q(i) = net_.forward(input)(0);
  }
  return q;
}

Critic train_critic(const Dataset& dataset, const CriticConfig& config) {
  config.validate();
  if (dataset.trajectories.empty()) throw InvalidArgument("train_critic: empty dataset");
  const ValidationResult validation = validate_dataset(dataset);
  if (!validation.ok()) {
    throw InvalidArgument("train_critic: invalid dataset: " + validation.summary());
  }
  const Dataset normalized = normalize_actions(dataset).dataset;
  const TrainingSet set = build_training_set(normalized, config);

  std::vector<std::size_t> sizes = {normalized.state_dim + normalized.action_dim};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(1);
  Mlp net(sizes, Activation::kIdentity, derive_seed(config.seed, "critic-init"));
  Mlp target_net = net;

  Eigen::MatrixXd targets = compute_targets(set, target_net, config);
  std::vector<double> losses;
  losses.push_back(mean_squared_error(net, set.inputs, targets));

  AdamState adam(net, config.lr);
  MinibatchSchedule schedule(static_cast<std::size_t>(set.inputs.cols()),
                             config.batch_size, derive_seed(config.seed, "critic-batches"));
  TrainConfig schedule_config{config.epochs, config.batch_size, config.lr,
                              config.lr_decay_every, config.seed};
  std::uint64_t updates = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    adam.lr = learning_rate_at(schedule_config, epoch);
    for (const auto& batch : schedule.next_epoch()) {
      const MlpGradients grads = mlp_gradient(net, gather_columns(set.inputs, batch),
                                              gather_columns(targets, batch));
      adam_update(adam, net, grads);
      if (++updates % config.target_sync_period == 0 &&
          config.mode == CriticMode::kTemporalDifference) {
        target_net = net;
        targets = compute_targets(set, target_net, config);
      }
    }
    losses.push_back(mean_squared_error(net, set.inputs, targets));
  }
  if (!net.all_finite()) throw Error("train_critic: parameters diverged");

  Critic critic(std::move(net), config, normalized.state_dim, normalized.action_dim);
  critic.dropped_transitions = set.dropped;
  critic.epoch_losses = std::move(losses);
  return critic;
}

void write_critic(const Critic& critic, std::ostream& out) {
  const CriticConfig& c = critic.config();
  out << "trajaudit-critic 1\n";
  out << "dims " << critic.state_dim() << ' ' << critic.action_dim() << '\n';
  out << "config " << format_real(c.gamma) << ' ' << to_string(c.mode) << ' '
      << c.epochs << ' ' << c.batch_size << ' ' << format_real(c.lr) << ' '
      << c.lr_decay_every << ' ' << c.target_sync_period << ' ' << c.seed << '\n';
  out << "diagnostics " << critic.dropped_transitions << ' '
      << critic.epoch_losses.size();
  write_reals(out, critic.epoch_losses);
  out << '\n';
  write_mlp(critic.net(), out);
}

Critic read_critic(std::istream& in, const std::string& source) {
  RecordReader reader(in, source);
  Record magic = reader.expect("trajaudit-critic");
  reader.expect_size(magic, 2);
  if (reader.unsigned_integer(magic, 1) != 1) reader.fail(magic, "unsupported critic version");
  Record dims = reader.expect("dims");
  reader.expect_size(dims, 3);
  Record cfg = reader.expect("config");
  reader.expect_size(cfg, 9);
  CriticConfig config;
  config.gamma = reader.real(cfg, 1);
  try {
    config.mode = parse_critic_mode(cfg.tokens[2]);
  } catch (const InvalidArgument& e) {
    reader.fail(cfg, e.what());
  }
  config.epochs = reader.unsigned_integer(cfg, 3);
  config.batch_size = reader.unsigned_integer(cfg, 4);
  config.lr = reader.real(cfg, 5);
  config.lr_decay_every = reader.unsigned_integer(cfg, 6);
  config.target_sync_period = reader.unsigned_integer(cfg, 7);
  config.seed = reader.unsigned_integer(cfg, 8);

  Record diag = reader.expect("diagnostics");
  if (diag.size() < 3) reader.fail(diag, "truncated diagnostics record");
  const std::size_t dropped = reader.unsigned_integer(diag, 1);
  const std::size_t n_losses = reader.unsigned_integer(diag, 2);
  reader.expect_size(diag, 3 + n_losses);
  std::vector<double> losses = reader.reals(diag, 3, n_losses);

  Mlp net = read_mlp(reader);
  config.hidden.assign(net.layer_sizes().begin() + 1, net.layer_sizes().end() - 1);
  try {
    Critic critic(std::move(net), config, reader.unsigned_integer(dims, 1),
                  reader.unsigned_integer(dims, 2));
    critic.dropped_transitions = dropped;
    critic.epoch_losses = std::move(losses);
    return critic;
  } catch (const InvalidArgument& e) {
    reader.fail(dims, e.what());
  }
}

void save_critic(const Critic& critic, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_critic(critic, out);
  if (!out) throw Error("failed writing " + path.string());
}

Critic load_critic(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw NotFound("critic not found: " + path.string());
  std::ifstream in(path);
  if (!in) throw NotFound("critic not found: " + path.string());
  return read_critic(in, path.string());
}

}  // namespace trajaudit
