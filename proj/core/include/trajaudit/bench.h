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

// TPR/TNR benchmark grid: audits every suspect against every target dataset
// over a cross product of audit settings.

#ifndef TRAJAUDIT_BENCH_H_
#define TRAJAUDIT_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "trajaudit/audit.h"

namespace trajaudit {

inline constexpr const char* kBenchReportSchema = "trajaudit.bench_report/1";

struct BenchTarget {
  std::shared_ptr<const Dataset> dataset;
  std::vector<PolicyPtr> shadows;  // at least max(shadow_counts)
  std::shared_ptr<const Critic> critic;
};

struct BenchSuspect {
  std::string label;
  // Dataset the suspect was actually trained on. A suspect is positive for
  // the target with this name and negative for every other target.
  std::string source_dataset;
  // Builds a fresh resolver per target so stochastic suspects restart their
  // stream and results do not depend on grid order.
  std::function<SuspectResolver(const std::string& target)> resolver_for;
};

// Suspect with the same deterministic policy for every target.
BenchSuspect plain_suspect(PolicyPtr policy, std::string source_dataset);

struct BenchGrid {
  std::vector<DistanceMetric> metrics = {DistanceMetric::kWasserstein};
  std::vector<Tester> testers = {Tester::kGrubbs};
  std::vector<double> alphas = {0.01};
  std::vector<double> fractions = {1.0};
  std::vector<std::size_t> shadow_counts = {15};
  std::size_t audited_trajectories = 50;
  double normality_level = 0.05;
  NormalityFailurePolicy normality_policy = NormalityFailurePolicy::kWarn;
  GrubbsSample grubbs_sample = GrubbsSample::kWithSuspect;
  std::uint64_t seed = 0;
  std::string variant = "plain";

  void validate() const;
};

struct RateSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population std of the pooled indicators
  std::size_t count = 0;
};

struct SuspectRate {
  std::string label;
  bool positive = false;
  // Fraction of decided trajectories with the expected verdict.
  double accuracy = 0.0;
  std::size_t members = 0;
  std::size_t non_members = 0;
  std::size_t skipped = 0;
};

struct BenchSetting {
  DistanceMetric metric = DistanceMetric::kWasserstein;
  Tester tester = Tester::kGrubbs;
  double alpha = 0.01;
  double fraction = 1.0;
  std::size_t shadow_count = 15;

  friend auto operator<=>(const BenchSetting&, const BenchSetting&) = default;
};

// One (target, setting) cell. TPR pools the per-trajectory member
// indicators of every positive suspect, TNR the non-member indicators of
// every negative suspect; skipped trajectories are excluded.
struct BenchCell {
  std::string target;
  BenchSetting setting;
  RateSummary tpr;
  RateSummary tnr;
  std::vector<SuspectRate> suspects;
  std::size_t normality_failures = 0;
};

// Per-setting aggregate: pooled rates over all targets plus the spread of
// the per-target cell rates.
struct BenchSummary {
  BenchSetting setting;
  RateSummary tpr;
  RateSummary tnr;
  double tpr_target_stddev = 0.0;
  double tnr_target_stddev = 0.0;
};

struct BenchResult {
  BenchGrid grid;
  std::vector<BenchCell> cells;        // target order, then setting order
  std::vector<BenchSummary> summary;   // setting order
  const BenchSummary& find(const BenchSetting& setting) const;
};

// Runs the grid. Fingerprints are collected once per target on a sample of
// audited trajectories seeded by (grid.seed, target name).
BenchResult bench_grid(const std::vector<BenchTarget>& targets,
                       const std::vector<BenchSuspect>& suspects,
                       const BenchGrid& grid);

std::string bench_to_json(const BenchResult& result,
                          const std::map<std::string, std::string>& run_config = {});

// Tab-separated table with one row per (target, setting) cell.
std::string bench_to_tsv(const BenchResult& result);

// Tab-separated table with one pooled row per setting.
std::string bench_summary_to_tsv(const BenchResult& result);

}  // namespace trajaudit

#endif  // TRAJAUDIT_BENCH_H_
