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

#include "fixtures.h"

#include <atomic>
#include <unistd.h>

#include "trajaudit/rng.h"

namespace trajaudit::testing {

Dataset random_dataset(std::size_t m, std::size_t n, std::size_t d_s, std::size_t d_a,
                       std::uint64_t seed, const std::string& name) {
  Rng rng(seed);
  Dataset dataset;
  dataset.name = name;
  dataset.state_dim = d_s;
  dataset.action_dim = d_a;
  for (std::size_t j = 0; j < d_a; ++j) {
    dataset.action_low.push_back(-1.0 - static_cast<double>(j));
    dataset.action_high.push_back(1.0 + 0.5 * static_cast<double>(j));
  }
  for (std::size_t i = 0; i < m; ++i) {
    Trajectory trajectory{i, {}};
    Vector state(d_s);
    for (double& s : state) s = rng.uniform(-1.0, 1.0);
    for (std::size_t t = 0; t < n; ++t) {
      Transition tr;
      tr.state = state;
      tr.action.resize(d_a);
      for (std::size_t j = 0; j < d_a; ++j) {
        tr.action[j] = rng.uniform(dataset.action_low[j], dataset.action_high[j]);
      }
      tr.reward = rng.normal();
      for (double& s : state) s += 0.1 * rng.normal();
      tr.next_state = state;
      trajectory.transitions.push_back(std::move(tr));
    }
    dataset.trajectories.push_back(std::move(trajectory));
  }
  return dataset;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("trajaudit-" + tag + "-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace trajaudit::testing
