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

#ifndef TRAJAUDIT_DATA_MODEL_H_
#define TRAJAUDIT_DATA_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trajaudit {

using Vector = std::vector<double>;
using TrajectoryId = std::uint64_t;

// One logged interaction step {s_t, a_t, r_t, s_{t+1}}. `terminal` marks a
// trajectory that genuinely ended at this step; horizon-truncated
// trajectories keep it false so TD targets bootstrap through the cut.
struct Transition {
  Vector state;
  Vector action;
  double reward = 0.0;
  Vector next_state;
  bool terminal = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct Trajectory {
  TrajectoryId id = 0;
  std::vector<Transition> transitions;

  std::size_t size() const { return transitions.size(); }
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct Dataset {
  std::string name;
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  Vector action_low;
  Vector action_high;
  std::vector<Trajectory> trajectories;

  std::size_t transition_count() const;
  // Trajectory with the given id, or nullptr.
  const Trajectory* find(TrajectoryId id) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct Violation {
  std::optional<std::size_t> trajectory;  // index into trajectories
  std::optional<std::size_t> step;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// Checks every dataset invariant. Never throws; violations are data.
ValidationResult validate_dataset(const Dataset& dataset);

// Text format, one record per line:
//   trajaudit-dataset 1
//   name <name>
//   dims <d_s> <d_a>
//   action_low <d_a reals>
//   action_high <d_a reals>
//   trajectories <m>
//   T <traj id> <step> <terminal 0|1> <state> <action> <reward> <next state>
// Reals carry 17 significant digits so a save/load cycle is bit-exact.
void write_dataset(const Dataset& dataset, std::ostream& out);
Dataset read_dataset(std::istream& in, const std::string& source = "<stream>");
// Refuses to write a dataset that fails validation (InvalidArgument).
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
// NotFound if the path does not exist, ParseError on malformed content.
Dataset load_dataset(const std::filesystem::path& path);

// Trajectory id -> index of the subset that holds it.
using MembershipMap = std::map<TrajectoryId, std::size_t>;

struct DatasetSplit {
  std::vector<Dataset> subsets;
  MembershipMap membership;
};

// Seeded uniform partition of the trajectories into `parts` subsets whose
// sizes differ by at most one. Subset i is named "<name>/part<i>".
DatasetSplit split_dataset(const Dataset& dataset, std::size_t parts,
                           std::uint64_t seed);

// Per-dimension affine map between the dataset's action box and [-1, 1].
struct ActionNormalization {
  Vector low;
  Vector high;

  Vector to_normalized(std::span<const double> action) const;
  Vector to_original(std::span<const double> action) const;
  bool is_identity() const;
};

struct NormalizedDataset {
  Dataset dataset;
  ActionNormalization mapping;
};

// a -> 2(a - low)/(high - low) - 1 in every dimension; bounds become -1/1.
NormalizedDataset normalize_actions(const Dataset& dataset);

}  // namespace trajaudit

#endif  // TRAJAUDIT_DATA_MODEL_H_
