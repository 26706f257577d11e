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

#include "trajaudit/fingerprint.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "trajaudit/error.h"
#include "trajaudit/text_records.h"

namespace trajaudit {

std::size_t audited_length(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("trajectory fraction must lie in (0, 1]");
  }
  // The tolerance absorbs products like 0.1 * 30 = 3.0000000000000004.
  const double scaled = fraction * static_cast<double>(n);
  const auto length = static_cast<std::size_t>(std::ceil(scaled - 1e-9 * scaled));
  return std::clamp<std::size_t>(length, 1, n);
}

Fingerprint collect_fingerprint(const Policy& policy, const Critic& critic,
                                const Trajectory& trajectory, double fraction) {
  if (trajectory.transitions.empty()) {
    throw InvalidArgument("collect_fingerprint: empty trajectory");
  }
  const std::size_t length = audited_length(trajectory.size(), fraction);
  const auto d_s = static_cast<Eigen::Index>(critic.state_dim());
  const auto d_a = static_cast<Eigen::Index>(critic.action_dim());
  Eigen::MatrixXd states(d_s, static_cast<Eigen::Index>(length));
  Eigen::MatrixXd actions(d_a, static_cast<Eigen::Index>(length));
  for (std::size_t t = 0; t < length; ++t) {
    const Vector& state = trajectory.transitions[t].state;
    const Vector action = policy.act(state);
    if (static_cast<Eigen::Index>(action.size()) != d_a) {
      throw InvalidArgument("collect_fingerprint: policy '" + policy.label() +
                            "' returned a wrong-sized action");
    }
    const auto column = static_cast<Eigen::Index>(t);
    states.col(column) = Eigen::Map<const Eigen::VectorXd>(state.data(), d_s);
    actions.col(column) = Eigen::Map<const Eigen::VectorXd>(action.data(), d_a);
  }
  const Eigen::VectorXd q = critic.evaluate_batch(states, actions);
  Fingerprint fingerprint{trajectory.id, policy.label(),
                          std::vector<double>(q.data(), q.data() + q.size())};
  for (double v : fingerprint.values) {
    if (!std::isfinite(v)) throw Error("collect_fingerprint: non-finite critic value");
  }
  return fingerprint;
}

Fingerprint prefix(const Fingerprint& fingerprint, std::size_t length) {
  if (length == 0 || length > fingerprint.values.size()) {
    throw InvalidArgument("prefix: length out of range");
  }
  return {fingerprint.trajectory, fingerprint.policy_label,
          std::vector<double>(fingerprint.values.begin(),
                              fingerprint.values.begin() +
                                  static_cast<std::ptrdiff_t>(length))};
}

std::vector<double> mean_fingerprint(std::span<const Fingerprint> fingerprints) {
  if (fingerprints.empty()) throw InvalidArgument("mean_fingerprint: no fingerprints");
  const std::size_t length = fingerprints.front().values.size();
  std::vector<double> mean(length, 0.0);
  for (const auto& fp : fingerprints) {
    if (fp.values.size() != length) {
      throw InvalidArgument("mean_fingerprint: length mismatch (" +
                            std::to_string(fp.values.size()) + " vs " +
                            std::to_string(length) + ")");
    }
    if (fp.trajectory != fingerprints.front().trajectory) {
      throw InvalidArgument("mean_fingerprint: fingerprints from different trajectories");
    }
    for (std::size_t t = 0; t < length; ++t) mean[t] += fp.values[t];
  }
  for (double& v : mean) v /= static_cast<double>(fingerprints.size());
  return mean;
}

void write_fingerprints(std::span<const Fingerprint> fingerprints, std::ostream& out) {
  for (const auto& fp : fingerprints) {
    out << "F " << fp.trajectory << ' ' << fp.policy_label << ' ' << fp.values.size();
    write_reals(out, fp.values);
    out << '\n';
  }
}

}  // namespace trajaudit
