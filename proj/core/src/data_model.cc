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

#include "trajaudit/data_model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "trajaudit/error.h"
#include "trajaudit/rng.h"
#include "trajaudit/text_records.h"

namespace trajaudit {
namespace {

constexpr std::string_view kDatasetMagic = "trajaudit-dataset";
constexpr std::uint64_t kDatasetVersion = 1;

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace

std::size_t Dataset::transition_count() const {
  std::size_t total = 0;
  for (const auto& trajectory : trajectories) total += trajectory.size();
  return total;
}

const Trajectory* Dataset::find(TrajectoryId id) const {
  for (const auto& trajectory : trajectories) {
    if (trajectory.id == id) return &trajectory;
  }
  return nullptr;
}

std::string ValidationResult::summary() const {
  if (ok()) return "ok";
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    const auto& v = violations[i];
    if (i > 0) out << "; ";
    if (v.trajectory) out << "trajectory " << *v.trajectory;
    if (v.step) out << " step " << *v.step;
    if (v.trajectory || v.step) out << ": ";
    out << v.message;
  }
  return out.str();
}

ValidationResult validate_dataset(const Dataset& dataset) {
  ValidationResult result;
  auto add = [&](std::optional<std::size_t> trajectory,
                 std::optional<std::size_t> step, std::string message) {
    result.violations.push_back({trajectory, step, std::move(message)});
  };

  if (dataset.trajectories.empty()) add(std::nullopt, std::nullopt, "m=0");
  if (dataset.state_dim == 0) add(std::nullopt, std::nullopt, "d_s=0");
  if (dataset.action_dim == 0) add(std::nullopt, std::nullopt, "d_a=0");
  if (dataset.action_low.size() != dataset.action_dim ||
      dataset.action_high.size() != dataset.action_dim) {
    add(std::nullopt, std::nullopt, "action bounds do not have length d_a");
  } else {
    for (std::size_t j = 0; j < dataset.action_dim; ++j) {
      const double lo = dataset.action_low[j];
      const double hi = dataset.action_high[j];
      if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        add(std::nullopt, std::nullopt,
            "action bound " + std::to_string(j) + " violates low < high");
      }
    }
  }

  std::set<TrajectoryId> seen;
  for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
    const Trajectory& trajectory = dataset.trajectories[i];
    if (!seen.insert(trajectory.id).second) {
      add(i, std::nullopt, "duplicate trajectory id " + std::to_string(trajectory.id));
    }
    if (trajectory.transitions.empty()) add(i, std::nullopt, "empty trajectory");
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
      const Transition& tr = trajectory.transitions[t];
      if (tr.state.size() != dataset.state_dim) {
        add(i, t, "state has length " + std::to_string(tr.state.size()) +
                      ", expected d_s=" + std::to_string(dataset.state_dim));
      }
      if (tr.next_state.size() != dataset.state_dim) {
        add(i, t, "next_state has length " + std::to_string(tr.next_state.size()) +
                      ", expected d_s=" + std::to_string(dataset.state_dim));
      }
      if (tr.action.size() != dataset.action_dim) {
        add(i, t, "action has length " + std::to_string(tr.action.size()) +
                      ", expected d_a=" + std::to_string(dataset.action_dim));
      }
      if (!all_finite(tr.state) || !all_finite(tr.action) ||
          !all_finite(tr.next_state) || !std::isfinite(tr.reward)) {
        add(i, t, "non-finite entry");
      }
      if (tr.terminal && t + 1 != trajectory.size()) {
        add(i, t, "terminal flag set before the last step");
      }
    }
  }
  return result;
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  out << kDatasetMagic << ' ' << kDatasetVersion << '\n';
  out << "name " << dataset.name << '\n';
  out << "dims " << dataset.state_dim << ' ' << dataset.action_dim << '\n';
  out << "action_low";
  write_reals(out, dataset.action_low);
  out << "\naction_high";
  write_reals(out, dataset.action_high);
  out << "\ntrajectories " << dataset.trajectories.size() << '\n';
  for (const auto& trajectory : dataset.trajectories) {
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
      const Transition& tr = trajectory.transitions[t];
      out << "T " << trajectory.id << ' ' << t << ' ' << (tr.terminal ? 1 : 0);
      write_reals(out, tr.state);
      write_reals(out, tr.action);
      out << ' ' << format_real(tr.reward);
      write_reals(out, tr.next_state);
      out << '\n';
    }
  }
}

Dataset read_dataset(std::istream& in, const std::string& source) {
  RecordReader reader(in, source);
  Dataset dataset;

  Record magic = reader.expect(kDatasetMagic);
  reader.expect_size(magic, 2);
  if (reader.unsigned_integer(magic, 1) != kDatasetVersion) {
    reader.fail(magic, "unsupported dataset format version " + magic.tokens[1]);
  }
  Record name = reader.expect("name");
  reader.expect_size(name, 2);
  dataset.name = name.tokens[1];

  Record dims = reader.expect("dims");
  reader.expect_size(dims, 3);
  dataset.state_dim = reader.unsigned_integer(dims, 1);
  dataset.action_dim = reader.unsigned_integer(dims, 2);
  if (dataset.state_dim == 0 || dataset.action_dim == 0) {
    reader.fail(dims, "dimensions must be positive");
  }
  const std::size_t d_s = dataset.state_dim;
  const std::size_t d_a = dataset.action_dim;

  Record low = reader.expect("action_low");
  reader.expect_size(low, 1 + d_a);
  dataset.action_low = reader.reals(low, 1, d_a);
  Record high = reader.expect("action_high");
  reader.expect_size(high, 1 + d_a);
  dataset.action_high = reader.reals(high, 1, d_a);

  Record count = reader.expect("trajectories");
  reader.expect_size(count, 2);
  const std::uint64_t m = reader.unsigned_integer(count, 1);

  const std::size_t width = 4 + d_s + d_a + 1 + d_s;
  while (auto record = reader.next()) {
    if (record->kind() != "T") {
      reader.fail(*record, "unexpected '" + record->kind() + "' record");
    }
    if (record->size() < 4) reader.fail(*record, "truncated transition record");
    const TrajectoryId id = reader.unsigned_integer(*record, 1);
    const std::uint64_t step = reader.unsigned_integer(*record, 2);
    if (record->size() != width) {
      reader.fail(*record, "transition record (trajectory " + std::to_string(id) +
                               ", step " + std::to_string(step) + ") has " +
                               std::to_string(record->size() - 4) +
                               " values, expected " + std::to_string(width - 4) +
                               " for d_s=" + std::to_string(d_s) +
                               ", d_a=" + std::to_string(d_a));
    }
    const std::uint64_t terminal = reader.unsigned_integer(*record, 3);
    if (terminal > 1) reader.fail(*record, "terminal flag must be 0 or 1");

    if (dataset.trajectories.empty() || dataset.trajectories.back().id != id) {
      if (step != 0) {
        reader.fail(*record, "trajectory " + std::to_string(id) +
                                 " does not start at step 0");
      }
      if (dataset.find(id) != nullptr) {
        reader.fail(*record, "trajectory " + std::to_string(id) +
                                 " is not contiguous");
      }
      dataset.trajectories.push_back(Trajectory{id, {}});
    }
    Trajectory& trajectory = dataset.trajectories.back();
    if (step != trajectory.size()) {
      reader.fail(*record, "expected step " + std::to_string(trajectory.size()) +
                               " of trajectory " + std::to_string(id));
    }
    Transition tr;
    std::size_t pos = 4;
    tr.state = reader.reals(*record, pos, d_s);
    pos += d_s;
    tr.action = reader.reals(*record, pos, d_a);
    pos += d_a;
    tr.reward = reader.real(*record, pos++);
    tr.next_state = reader.reals(*record, pos, d_s);
    tr.terminal = terminal == 1;
    trajectory.transitions.push_back(std::move(tr));
  }
  if (dataset.trajectories.size() != m) {
    reader.fail(reader.line(), "header declares " + std::to_string(m) +
                                   " trajectories, found " +
                                   std::to_string(dataset.trajectories.size()));
  }
  return dataset;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  const ValidationResult validation = validate_dataset(dataset);
  if (!validation.ok()) {
    throw InvalidArgument("refusing to save invalid dataset '" + dataset.name +
                          "': " + validation.summary());
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_dataset(dataset, out);
  if (!out) throw Error("failed writing " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!std::filesystem::exists(path) || !in) {
    throw NotFound("dataset not found: " + path.string());
  }
  return read_dataset(in, path.string());
}

DatasetSplit split_dataset(const Dataset& dataset, std::size_t parts,
                           std::uint64_t seed) {
  const std::size_t m = dataset.trajectories.size();
  if (parts == 0 || parts > m) {
    throw InvalidArgument("split_dataset: need 1 <= K <= m, got K=" +
                          std::to_string(parts) + ", m=" + std::to_string(m));
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = m; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }

  DatasetSplit split;
  split.subsets.resize(parts);
  const std::size_t base = m / parts;
  const std::size_t extra = m % parts;
  std::size_t cursor = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t size = base + (p < extra ? 1 : 0);
    std::vector<std::size_t> members(order.begin() + cursor,
                                     order.begin() + cursor + size);
    cursor += size;
    std::sort(members.begin(), members.end());

    Dataset& subset = split.subsets[p];
    subset.name = parts == 1 ? dataset.name
                             : dataset.name + "/part" + std::to_string(p);
    subset.state_dim = dataset.state_dim;
    subset.action_dim = dataset.action_dim;
    subset.action_low = dataset.action_low;
    subset.action_high = dataset.action_high;
    for (std::size_t index : members) {
      subset.trajectories.push_back(dataset.trajectories[index]);
      split.membership[dataset.trajectories[index].id] = p;
    }
  }
  return split;
}

Vector ActionNormalization::to_normalized(std::span<const double> action) const {
  Vector out(action.begin(), action.end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (low[j] == -1.0 && high[j] == 1.0) continue;
    out[j] = 2.0 * (action[j] - low[j]) / (high[j] - low[j]) - 1.0;
  }
  return out;
}

Vector ActionNormalization::to_original(std::span<const double> action) const {
  Vector out(action.begin(), action.end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (low[j] == -1.0 && high[j] == 1.0) continue;
    out[j] = low[j] + (action[j] + 1.0) * 0.5 * (high[j] - low[j]);
  }
  return out;
}

bool ActionNormalization::is_identity() const {
  for (std::size_t j = 0; j < low.size(); ++j) {
    if (low[j] != -1.0 || high[j] != 1.0) return false;
  }
  return true;
}

NormalizedDataset normalize_actions(const Dataset& dataset) {
  if (dataset.action_low.size() != dataset.action_dim ||
      dataset.action_high.size() != dataset.action_dim) {
    throw InvalidArgument("normalize_actions: action bounds do not match d_a");
  }
  for (std::size_t j = 0; j < dataset.action_dim; ++j) {
    if (dataset.action_low[j] == dataset.action_high[j]) {
      throw InvalidArgument("degenerate action range in dimension " +
                            std::to_string(j));
    }
    if (!(dataset.action_low[j] < dataset.action_high[j])) {
      throw InvalidArgument("action bound low > high in dimension " +
                            std::to_string(j));
    }
  }
  NormalizedDataset result{dataset, {dataset.action_low, dataset.action_high}};
  if (result.mapping.is_identity()) return result;
  for (auto& trajectory : result.dataset.trajectories) {
    for (auto& tr : trajectory.transitions) {
      tr.action = result.mapping.to_normalized(tr.action);
    }
  }
  result.dataset.action_low.assign(dataset.action_dim, -1.0);
  result.dataset.action_high.assign(dataset.action_dim, 1.0);
  return result;
}

}  // namespace trajaudit
