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

// The auditor's critic Q(s, a): an MLP over concat(state, normalized action)
// trained to predict the discounted cumulative reward of a state-action pair.

#ifndef TRAJAUDIT_CRITIC_H_
#define TRAJAUDIT_CRITIC_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "trajaudit/data_model.h"
#include "trajaudit/neural.h"

namespace trajaudit {

enum class CriticMode {
  kTemporalDifference,  // bootstrapped one-step targets, target network
  kMonteCarlo,          // regression on full discounted returns
};

std::string to_string(CriticMode mode);
CriticMode parse_critic_mode(const std::string& text);

struct CriticConfig {
  double gamma = 0.99;
  std::vector<std::size_t> hidden = {64, 64};
  std::size_t epochs = 60;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  std::size_t lr_decay_every = 20;
  // Gradient updates between copies of the online weights into the frozen
  // target network.
  std::size_t target_sync_period = 200;
  CriticMode mode = CriticMode::kTemporalDifference;
  std::uint64_t seed = 0;

  void validate() const;
};

// G_t = r_t + gamma * G_{t+1}, computed backwards from the last step.
std::vector<double> mc_returns(const Trajectory& trajectory, double gamma);

class Critic {
 public:
  Critic(Mlp net, CriticConfig config, std::size_t state_dim,
         std::size_t action_dim);

  // Action in the dataset's normalized [-1, 1] space.
  double evaluate(std::span<const double> state, std::span<const double> action) const;
  // Column i of `states` / `actions` is one pair.
  Eigen::VectorXd evaluate_batch(const Eigen::MatrixXd& states,
                                 const Eigen::MatrixXd& actions) const;

  const Mlp& net() const { return net_; }
  const CriticConfig& config() const { return config_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }

  // Training diagnostics, also serialized.
  std::size_t dropped_transitions = 0;
  std::vector<double> epoch_losses;

 private:
  Mlp net_;
  CriticConfig config_;
  std::size_t state_dim_;
  std::size_t action_dim_;
};

// TD: targets r_t + gamma * Q_target(s_{t+1}, a_{t+1}) with a_{t+1} the
// dataset's next recorded action; terminal steps use r_t alone. The last
// step of a truncated trajectory has no a_{t+1} and is dropped (counted in
// dropped_transitions). MC: targets are mc_returns and every trajectory must
// end in a terminal step. epoch_losses[e] is the full-data loss against the
// targets in force at the end of epoch e (index 0 is before training).
Critic train_critic(const Dataset& dataset, const CriticConfig& config);

// Text envelope: "trajaudit-critic 1", a "config" sidecar record, a
// "diagnostics" record, then the mlp records.
void save_critic(const Critic& critic, const std::filesystem::path& path);
Critic load_critic(const std::filesystem::path& path);
void write_critic(const Critic& critic, std::ostream& out);
Critic read_critic(std::istream& in, const std::string& source = "<stream>");

}  // namespace trajaudit

#endif  // TRAJAUDIT_CRITIC_H_
