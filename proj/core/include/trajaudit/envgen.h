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

// Synthetic offline-RL data source: a double-integrator point mass driven by
// scripted proportional-derivative controllers. Distinct controller gains
// yield datasets whose behaviour policies can be told apart.

#ifndef TRAJAUDIT_ENVGEN_H_
#define TRAJAUDIT_ENVGEN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trajaudit/data_model.h"
#include "trajaudit/rng.h"

namespace trajaudit {

// State is (position, velocity); the action is a scalar force in [-1, 1].
struct LinearControlEnv {
  double dt = 0.1;
  std::size_t horizon = 40;
  double c_pos = 1.0;
  double c_act = 0.01;
  // When set, the last step of every rollout is flagged terminal (complete
  // episodes); otherwise rollouts are horizon-truncated.
  bool terminal_at_horizon = false;

  static constexpr std::size_t kStateDim = 2;
  static constexpr std::size_t kActionDim = 1;

  void validate() const;
};

struct StepResult {
  Vector next_state;
  double reward = 0.0;
};

// position' = position + dt * velocity, velocity' = velocity + dt * action,
// reward = -c_pos * position^2 - c_act * action^2.
StepResult step_env(const LinearControlEnv& env, std::span<const double> state,
                    double action);

struct GainController {
  double k_pos = 1.0;
  double k_vel = 0.5;
  double exploration_sigma = 0.0;
};

// clip(-k_pos * position - k_vel * velocity + noise, -1, 1); noise is drawn
// from `noise` only when exploration_sigma > 0.
double controller_action(const GainController& controller,
                         std::span<const double> state, Rng& noise);

// n_traj rollouts of length env.horizon. Trajectory i draws its initial
// state (uniform in [-1, 1]^2) and exploration noise from a stream derived
// from (seed, i), so the result does not depend on generation order.
Dataset generate_dataset(const LinearControlEnv& env,
                         const GainController& controller, std::size_t n_traj,
                         std::uint64_t seed, std::string name = "dataset");

// The five reference behaviour controllers used by the benchmark grid.
std::vector<GainController> benchmark_controllers(double exploration_sigma = 0.05);

}  // namespace trajaudit

#endif  // TRAJAUDIT_ENVGEN_H_
