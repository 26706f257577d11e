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

#include "trajaudit/envgen.h"

#include <algorithm>
#include <cmath>

#include "trajaudit/error.h"

namespace trajaudit {

void LinearControlEnv::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("env: dt must be > 0");
  if (horizon < 2) throw InvalidArgument("env: horizon must be >= 2");
  if (!(c_pos >= 0.0) || !(c_act >= 0.0)) {
    throw InvalidArgument("env: reward coefficients must be nonnegative");
  }
}

StepResult step_env(const LinearControlEnv& env, std::span<const double> state,
                    double action) {
  if (state.size() != LinearControlEnv::kStateDim) {
    throw InvalidArgument("step_env: state must have 2 entries");
  }
  const double position = state[0];
  const double velocity = state[1];
  if (!std::isfinite(position) || !std::isfinite(velocity) ||
      !std::isfinite(action)) {
    throw InvalidArgument("step_env: non-finite input");
  }
  if (std::abs(action) > 1.0) throw InvalidArgument("step_env: |action| > 1");
  StepResult result;
  result.next_state = {position + env.dt * velocity, velocity + env.dt * action};
  result.reward = -env.c_pos * position * position - env.c_act * action * action;
  return result;
}

double controller_action(const GainController& controller,
                         std::span<const double> state, Rng& noise) {
  double action = -controller.k_pos * state[0] - controller.k_vel * state[1];
  if (controller.exploration_sigma > 0.0) {
    action += controller.exploration_sigma * noise.normal();
  }
  return std::clamp(action, -1.0, 1.0);
}

Dataset generate_dataset(const LinearControlEnv& env,
                         const GainController& controller, std::size_t n_traj,
                         std::uint64_t seed, std::string name) {
  env.validate();
  if (n_traj == 0) throw InvalidArgument("generate_dataset: n_traj must be >= 1");

  Dataset dataset;
  dataset.name = std::move(name);
  dataset.state_dim = LinearControlEnv::kStateDim;
  dataset.action_dim = LinearControlEnv::kActionDim;
  dataset.action_low = {-1.0};
  dataset.action_high = {1.0};
  dataset.trajectories.resize(n_traj);

  for (std::size_t i = 0; i < n_traj; ++i) {
    Rng rng(derive_seed(seed, i));
    Trajectory& trajectory = dataset.trajectories[i];
    trajectory.id = i;
    trajectory.transitions.reserve(env.horizon);
    Vector state = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    for (std::size_t t = 0; t < env.horizon; ++t) {
      const double action = controller_action(controller, state, rng);
      StepResult step = step_env(env, state, action);
      Transition tr;
      tr.state = state;
      tr.action = {action};
      tr.reward = step.reward;
      tr.next_state = step.next_state;
      tr.terminal = env.terminal_at_horizon && t + 1 == env.horizon;
      trajectory.transitions.push_back(std::move(tr));
      state = std::move(step.next_state);
    }
  }
  return dataset;
}

std::vector<GainController> benchmark_controllers(double exploration_sigma) {
  return {
      {0.5, 0.5, exploration_sigma},
      {1.0, 0.5, exploration_sigma},
      {1.5, 0.5, exploration_sigma},
      {1.0, 1.0, exploration_sigma},
      {2.0, 0.2, exploration_sigma},
  };
}

}  // namespace trajaudit
