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

#ifndef TRAJAUDIT_FINGERPRINT_H_
#define TRAJAUDIT_FINGERPRINT_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "trajaudit/critic.h"
#include "trajaudit/data_model.h"
#include "trajaudit/policy.h"

namespace trajaudit {

// Critic values along one trajectory's recorded states, with the actions
// one policy chose there.
struct Fingerprint {
  TrajectoryId trajectory = 0;
  std::string policy_label;
  std::vector<double> values;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

// ceil(fraction * n), at least 1. fraction must lie in (0, 1].
std::size_t audited_length(std::size_t n, double fraction);

// For t < audited_length(n, fraction): Q(s_t, policy(s_t)). States come from
// the dataset; nothing is rolled out. `trajectory` must come from the
// dataset the critic was trained on (actions are in its normalized space).
Fingerprint collect_fingerprint(const Policy& policy, const Critic& critic,
                                const Trajectory& trajectory, double fraction);

// The first `length` values of `fingerprint`.
Fingerprint prefix(const Fingerprint& fingerprint, std::size_t length);

// Element-wise mean of fingerprints that share a trajectory and a length.
std::vector<double> mean_fingerprint(std::span<const Fingerprint> fingerprints);

// One line per fingerprint: "F <trajectory> <label> <length> <values...>".
void write_fingerprints(std::span<const Fingerprint> fingerprints, std::ostream& out);

}  // namespace trajaudit

#endif  // TRAJAUDIT_FINGERPRINT_H_
