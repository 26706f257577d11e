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

#include "trajaudit/audit.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"

#include "trajaudit/bench.h"
#include "trajaudit/envgen.h"
#include "trajaudit/error.h"
#include "trajaudit/rng.h"

namespace trajaudit {
namespace {

using nlohmann::json;

std::vector<Fingerprint> noisy_shadows(Rng& rng, std::size_t k, std::size_t n,
                                       double spread, TrajectoryId id = 0) {
  std::vector<Fingerprint> shadows;
  for (std::size_t i = 0; i < k; ++i) {
    Fingerprint fp{id, "shadow" + std::to_string(i), {}};
    for (std::size_t t = 0; t < n; ++t) {
      fp.values.push_back(-1.0 - 0.05 * static_cast<double>(t) + spread * rng.normal());
    }
    shadows.push_back(std::move(fp));
  }
  return shadows;
}

std::vector<double> elementwise_mean(const std::vector<Fingerprint>& fps) {
  std::vector<double> mean(fps.front().values.size(), 0.0);
  for (const auto& fp : fps) {
    for (std::size_t t = 0; t < mean.size(); ++t) mean[t] += fp.values[t];
  }
  for (double& v : mean) v /= static_cast<double>(fps.size());
  return mean;
}

TEST(AuditTrajectory, SuspectAtShadowMeanIsMember) {
  // Shadows spread around the mean, so their distances reach down toward 0.
  std::vector<Fingerprint> shadows;
  for (int i = 0; i < 15; ++i) {
    const double offset = 0.04 * (i - 7);
    std::vector<double> values;
    for (int t = 0; t < 40; ++t) values.push_back(-1.0 - 0.05 * t + offset);
    shadows.push_back({0, "shadow", values});
  }
  const Fingerprint suspect{0, "s", elementwise_mean(shadows)};
  const TrajectoryVerdict v = audit_trajectory(shadows, suspect, AuditConfig{});
  EXPECT_NEAR(v.suspect_distance, 0.0, 1e-15);
  for (double d : v.shadow_distances) EXPECT_GE(d, v.suspect_distance);
  EXPECT_EQ(v.verdict, Verdict::kMember);
}

TEST(AuditTrajectory, TestIsTwoSided) {
  // With tightly concentrated shadow distances, a suspect sitting exactly on
  // the mean is far from them in standard units and the statistic, which
  // uses the absolute deviation, flags it.
  Rng rng(1);
  const auto shadows = noisy_shadows(rng, 15, 40, 0.1);
  const Fingerprint suspect{0, "s", elementwise_mean(shadows)};
  const TrajectoryVerdict v = audit_trajectory(shadows, suspect, AuditConfig{});
  EXPECT_LT(v.suspect_distance, *std::min_element(v.shadow_distances.begin(),
                                                  v.shadow_distances.end()));
  EXPECT_EQ(v.verdict, Verdict::kNonMember);
}

TEST(AuditTrajectory, GrossOffsetIsNonMember) {
  Rng rng(2);
  const auto shadows = noisy_shadows(rng, 15, 40, 0.1);
  std::vector<double> values = elementwise_mean(shadows);
  for (double& v : values) v += 100.0;
  const TrajectoryVerdict v = audit_trajectory(shadows, Fingerprint{0, "s", values},
                                               AuditConfig{});
  EXPECT_EQ(v.verdict, Verdict::kNonMember);
  EXPECT_TRUE(v.outcome.is_outlier);
}

TEST(AuditTrajectory, DistancesUseShadowOnlyMean) {
  Rng rng(3);
  const auto shadows = noisy_shadows(rng, 6, 12, 0.2);
  const Fingerprint suspect{0, "s", noisy_shadows(rng, 1, 12, 0.5)[0].values};
  for (auto metric : {DistanceMetric::kL1, DistanceMetric::kL2, DistanceMetric::kCosine,
                      DistanceMetric::kWasserstein}) {
    AuditConfig config;
    config.metric = metric;
    const TrajectoryVerdict v = audit_trajectory(shadows, suspect, config);
    const auto mean = elementwise_mean(shadows);
    ASSERT_EQ(v.shadow_distances.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_DOUBLE_EQ(v.shadow_distances[i], distance(metric, shadows[i].values, mean));
    }
    EXPECT_DOUBLE_EQ(v.suspect_distance, distance(metric, suspect.values, mean));
    const TestOutcome expected = grubbs_decide(v.shadow_distances, v.suspect_distance, 0.01);
    EXPECT_EQ(v.outcome.statistic, expected.statistic);
    EXPECT_EQ(v.verdict, expected.is_outlier ? Verdict::kNonMember : Verdict::kMember);
  }
}

TEST(AuditTrajectory, NormalitySampleExcludesSuspect) {
  Rng rng(4);
  const auto shadows = noisy_shadows(rng, 9, 20, 0.1);
  const Fingerprint suspect{0, "s", noisy_shadows(rng, 1, 20, 3.0)[0].values};
  const TrajectoryVerdict v = audit_trajectory(shadows, suspect, AuditConfig{});
  ASSERT_TRUE(v.normality.has_value());
  EXPECT_EQ(v.normality->statistic, anderson_darling_normal(v.shadow_distances).statistic);
  EXPECT_EQ(v.normality->sample_size, 9u);
}

TEST(AuditTrajectory, NormalityOmittedForSmallShadowSets) {
  Rng rng(5);
  const auto shadows = noisy_shadows(rng, 4, 10, 0.1);
  const TrajectoryVerdict v = audit_trajectory(shadows, shadows[0], AuditConfig{});
  EXPECT_FALSE(v.normality.has_value());
}

TEST(AuditTrajectory, SkipPolicyOnNormalityFailure) {
  // Shadow distances split into two tight clusters (0.1 and 1.0), which
  // fails the normality check. The shadow mean stays at 2.
  std::vector<Fingerprint> shadows;
  for (int i = 0; i < 20; ++i) {
    const double size = (i < 10 ? 0.1 : 1.0) + 1e-4 * (i / 2);
    shadows.push_back({0, "s", {2.0 + (i % 2 == 0 ? size : -size)}});
  }
  const Fingerprint suspect{0, "x", {2.5}};
  AuditConfig config;
  const TrajectoryVerdict warned = audit_trajectory(shadows, suspect, config);
  ASSERT_TRUE(warned.normality.has_value());
  ASSERT_FALSE(warned.normality->passes);
  EXPECT_NE(warned.verdict, Verdict::kSkipped);
  config.normality_policy = NormalityFailurePolicy::kSkipTrajectory;
  EXPECT_EQ(audit_trajectory(shadows, suspect, config).verdict, Verdict::kSkipped);
}

TEST(AuditTrajectory, ThreeSigmaTester) {
  Rng rng(6);
  const auto shadows = noisy_shadows(rng, 15, 40, 0.1);
  AuditConfig config;
  config.tester = Tester::kThreeSigma;
  const TrajectoryVerdict v = audit_trajectory(shadows, shadows[3], config);
  const TestOutcome expected = three_sigma_decide(v.shadow_distances, v.suspect_distance);
  EXPECT_EQ(v.outcome.is_outlier, expected.is_outlier);
  EXPECT_EQ(v.outcome.threshold, 3.0);
}

TEST(AuditTrajectory, Errors) {
  Rng rng(7);
  const auto shadows = noisy_shadows(rng, 3, 10, 0.1);
  EXPECT_THROW(audit_trajectory(std::span(shadows).first(1), shadows[0], AuditConfig{}),
               InvalidArgument);
  EXPECT_THROW(audit_trajectory(shadows, Fingerprint{0, "s", {1.0}}, AuditConfig{}),
               InvalidArgument);
}

TEST(AuditTrajectory, LoweringAlphaNeverCreatesNonMembers) {
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const auto shadows = noisy_shadows(rng, 15, 20, 0.1);
    const Fingerprint suspect{0, "s", noisy_shadows(rng, 1, 20, 0.1 + 0.2 * rng.uniform())[0].values};
    bool was_member = false;
    for (double alpha : {0.05, 0.01, 1e-3, 1e-4, 1e-6}) {
      AuditConfig config;
      config.alpha = alpha;
      const bool member = audit_trajectory(shadows, suspect, config).verdict == Verdict::kMember;
      if (was_member) ASSERT_TRUE(member) << "alpha=" << alpha;
      was_member = member;
    }
  }
}

TEST(AuditConfig, Validation) {
  EXPECT_NO_THROW(AuditConfig{}.validate());
  const auto invalid = [](auto mutate) {
    AuditConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), InvalidArgument);
  };
  invalid([](AuditConfig& c) { c.alpha = 0.0; });
  invalid([](AuditConfig& c) { c.alpha = 1.0; });
  invalid([](AuditConfig& c) { c.shadow_count = 1; });
  invalid([](AuditConfig& c) { c.fraction = 0.0; });
  invalid([](AuditConfig& c) { c.fraction = 1.01; });
  invalid([](AuditConfig& c) { c.audited_trajectories = 0; });
  invalid([](AuditConfig& c) { c.normality_level = 0.2; });
  EXPECT_EQ(parse_tester("grubbs"), Tester::kGrubbs);
  EXPECT_EQ(parse_tester("three-sigma"), Tester::kThreeSigma);
  EXPECT_THROW(parse_tester("t"), InvalidArgument);
  EXPECT_EQ(parse_normality_failure_policy("skip-trajectory"),
            NormalityFailurePolicy::kSkipTrajectory);
}

Dataset id_dataset(std::size_t m) {
  Dataset d;
  d.name = "ids";
  for (std::size_t i = 0; i < m; ++i) d.trajectories.push_back(Trajectory{100 + i, {}});
  return d;
}

TEST(SampleAuditedTrajectories, SortedDistinctSubset) {
  const Dataset d = id_dataset(100);
  const auto ids = sample_audited_trajectories(d, 50, 3);
  ASSERT_EQ(ids.size(), 50u);
  EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
  EXPECT_EQ(std::set<TrajectoryId>(ids.begin(), ids.end()).size(), 50u);
  for (auto id : ids) EXPECT_NE(d.find(id), nullptr);
  EXPECT_EQ(ids, sample_audited_trajectories(d, 50, 3));
  EXPECT_NE(ids, sample_audited_trajectories(d, 50, 4));
  EXPECT_EQ(sample_audited_trajectories(d, 500, 3).size(), 100u);
}

TEST(SampleAuditedTrajectories, RoughlyUniform) {
  const Dataset d = id_dataset(10);
  std::map<TrajectoryId, int> hits;
  const int draws = 4000;
  for (int seed = 0; seed < draws; ++seed) {
    for (auto id : sample_audited_trajectories(d, 3, static_cast<std::uint64_t>(seed))) ++hits[id];
  }
  // Each id is included with probability 0.3; 5 sigma is about 0.036.
  for (const auto& [id, count] : hits) {
    EXPECT_NEAR(static_cast<double>(count) / draws, 0.3, 0.036) << "id " << id;
  }
}

AuditReport report_with(std::size_t members, std::size_t non_members, std::size_t skipped) {
  AuditReport r;
  TrajectoryId id = 0;
  for (std::size_t i = 0; i < members; ++i) r.verdicts.push_back({.trajectory = id++, .verdict = Verdict::kMember});
  for (std::size_t i = 0; i < non_members; ++i) r.verdicts.push_back({.trajectory = id++, .verdict = Verdict::kNonMember});
  for (std::size_t i = 0; i < skipped; ++i) r.verdicts.push_back({.trajectory = id++, .verdict = Verdict::kSkipped});
  return r;
}

TEST(AuditReport, CountsAndFraction) {
  const AuditReport r = report_with(6, 3, 1);
  EXPECT_EQ(r.members() + r.non_members() + r.skipped(), r.verdicts.size());
  EXPECT_DOUBLE_EQ(r.member_fraction(), 6.0 / 9.0);
  EXPECT_EQ(report_with(0, 0, 4).member_fraction(), 0.0);
}

TEST(DatasetVerdict, ThresholdRule) {
  EXPECT_TRUE(dataset_verdict(report_with(24, 1, 0), 0.5));   // 0.96
  EXPECT_FALSE(dataset_verdict(report_with(1, 49, 0), 0.5));  // 0.02
  EXPECT_TRUE(dataset_verdict(report_with(5, 5, 0), 0.5));    // boundary
  EXPECT_THROW(dataset_verdict(report_with(1, 1, 0), 0.0), InvalidArgument);
  EXPECT_THROW(dataset_verdict(report_with(1, 1, 0), 1.5), InvalidArgument);
}

TEST(ReportJson, StructureAndNonFiniteValues) {
  AuditReport r = report_with(1, 1, 0);
  r.target_dataset = "ctrl0";
  r.suspect_label = "ctrl0/bc-142";
  r.verdicts[1].outcome.statistic = std::numeric_limits<double>::infinity();
  r.verdicts[1].outcome.degenerate = true;
  const std::string text =
      report_to_json(r, ReportContext{{{"seed", "0"}, {"out", "x"}}, 0.5});
  const json doc = json::parse(text);
  EXPECT_EQ(doc["schema"], kAuditReportSchema);
  EXPECT_EQ(doc["target_dataset"], "ctrl0");
  EXPECT_EQ(doc["suspect"], "ctrl0/bc-142");
  EXPECT_EQ(doc["summary"]["members"], 1);
  EXPECT_EQ(doc["summary"]["non_members"], 1);
  EXPECT_EQ(doc["summary"]["member_fraction"], 0.5);
  EXPECT_EQ(doc["dataset_verdict"]["pirated"], true);
  EXPECT_EQ(doc["run_config"]["seed"], "0");
  EXPECT_TRUE(doc["trajectories"][1]["test"]["statistic"].is_null());
  EXPECT_EQ(doc["trajectories"][0]["verdict"], "member");
  EXPECT_TRUE(doc["trajectories"][0]["normality"].is_null());
  // Keys are emitted in sorted order and nothing depends on wall-clock time.
  std::vector<std::string> keys;
  for (const auto& [key, value] : doc.items()) keys.push_back(key);
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  EXPECT_EQ(text.find("time"), std::string::npos);
  EXPECT_EQ(text, report_to_json(r, ReportContext{{{"seed", "0"}, {"out", "x"}}, 0.5}));
}

// End-to-end fixture at desk scale: a target dataset, 16 shadows (one held
// out as a positive suspect) and a suspect trained on another controller.
struct Pipeline {
  Dataset target;
  std::vector<PolicyPtr> shadows;
  PolicyPtr held_out;
  PolicyPtr foreign;
  Critic critic;
};

const Pipeline& pipeline() {
  static const Pipeline p = [] {
    const auto controllers = benchmark_controllers();
    Dataset target = generate_dataset(LinearControlEnv{}, controllers[0], 100,
                                      derive_seed(0, "ctrl0"), "ctrl0");
    const Dataset other = generate_dataset(LinearControlEnv{}, controllers[3], 100,
                                           derive_seed(0, "ctrl3"), "ctrl3");
    auto shadows = train_shadows(target, 16, PolicyNetConfig{}, 42);
    PolicyPtr held_out = shadows.back();
    shadows.pop_back();
    PolicyPtr foreign = train_bc(other, PolicyNetConfig{}, 142);
    CriticConfig critic_config;
    critic_config.seed = derive_seed(0, "critic/ctrl0");
    Critic critic = train_critic(target, critic_config);
    return Pipeline{std::move(target), std::move(shadows), std::move(held_out),
                    std::move(foreign), std::move(critic)};
  }();
  return p;
}

TEST(AuditModel, HeldOutShadowIsMember) {
  const Pipeline& p = pipeline();
  const AuditReport r = audit_model(p.target, p.shadows, p.critic, p.held_out, AuditConfig{});
  EXPECT_EQ(r.verdicts.size(), 50u);
  EXPECT_EQ(r.suspect_label, "ctrl0/bc-57");
  RecordProperty("member_fraction", std::to_string(r.member_fraction()));
  EXPECT_GE(r.member_fraction(), 0.9);
  EXPECT_TRUE(dataset_verdict(r, 0.5));
}

TEST(AuditModel, ForeignSuspectIsNotMember) {
  const Pipeline& p = pipeline();
  const AuditReport r = audit_model(p.target, p.shadows, p.critic, p.foreign, AuditConfig{});
  RecordProperty("member_fraction", std::to_string(r.member_fraction()));
  EXPECT_LE(r.member_fraction(), 0.1);
  EXPECT_FALSE(dataset_verdict(r, 0.5));
  EXPECT_GE(r.member_fraction(), 0.0);
  EXPECT_EQ(r.members() + r.non_members() + r.skipped(), 50u);
}

TEST(AuditModel, DeterministicReports) {
  const Pipeline& p = pipeline();
  AuditConfig config;
  config.audited_trajectories = 20;
  const auto a = report_to_json(audit_model(p.target, p.shadows, p.critic, p.held_out, config));
  const auto b = report_to_json(audit_model(p.target, p.shadows, p.critic, p.held_out, config));
  EXPECT_EQ(a, b);
}

TEST(AuditModel, FingerprintPathMatchesDirectAudit) {
  const Pipeline& p = pipeline();
  AuditConfig config;
  config.audited_trajectories = 5;
  config.shadow_count = 9;
  config.fraction = 0.5;
  const AuditReport r = audit_model(p.target, p.shadows, p.critic, p.foreign, config);
  ASSERT_EQ(r.verdicts.size(), 5u);
  for (const auto& v : r.verdicts) {
    const Trajectory& t = *p.target.find(v.trajectory);
    std::vector<Fingerprint> shadows;
    for (std::size_t i = 0; i < 9; ++i) {
      shadows.push_back(collect_fingerprint(*p.shadows[i], p.critic, t, 0.5));
    }
    const Fingerprint suspect = collect_fingerprint(*p.foreign, p.critic, t, 0.5);
    const TrajectoryVerdict direct = audit_trajectory(shadows, suspect, config);
    EXPECT_EQ(direct.shadow_distances, v.shadow_distances);
    EXPECT_EQ(direct.suspect_distance, v.suspect_distance);
    EXPECT_EQ(direct.verdict, v.verdict);
  }
}

TEST(AuditModel, RequiresEnoughShadows) {
  const Pipeline& p = pipeline();
  AuditConfig config;
  config.shadow_count = 16;
  EXPECT_THROW(audit_model(p.target, p.shadows, p.critic, p.held_out, config), InvalidArgument);
}

TEST(BenchGrid, OnePositiveOneNegative) {
  const Pipeline& p = pipeline();
  BenchTarget target{std::make_shared<const Dataset>(p.target), p.shadows,
                     std::make_shared<const Critic>(p.critic)};
  BenchGrid grid;
  grid.audited_trajectories = 10;
  grid.shadow_counts = {9, 15};
  grid.fractions = {1.0, 0.5};
  const BenchResult result = bench_grid({target},
                                        {plain_suspect(p.held_out, "ctrl0"),
                                         plain_suspect(p.foreign, "ctrl3")},
                                        grid);
  ASSERT_EQ(result.cells.size(), 4u);
  for (const auto& cell : result.cells) {
    EXPECT_EQ(cell.target, "ctrl0");
    EXPECT_GE(cell.tpr.mean, 0.0);
    EXPECT_LE(cell.tpr.mean, 1.0);
    EXPECT_GE(cell.tnr.mean, 0.0);
    EXPECT_LE(cell.tnr.mean, 1.0);
    EXPECT_EQ(cell.tpr.count + cell.tnr.count, 20u);
    ASSERT_EQ(cell.suspects.size(), 2u);
    EXPECT_TRUE(cell.suspects[0].positive);
    EXPECT_FALSE(cell.suspects[1].positive);
    const double m = cell.tpr.mean;
    EXPECT_NEAR(cell.tpr.stddev, std::sqrt(m * (1.0 - m)), 1e-12);
  }
  EXPECT_EQ(result.summary.size(), 4u);
  const BenchSetting setting{DistanceMetric::kWasserstein, Tester::kGrubbs, 0.01, 0.5, 9};
  EXPECT_EQ(result.find(setting).setting, setting);

  const std::string tsv = bench_to_tsv(result);
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 5);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')),
            "target\tmetric\ttester\talpha\tfraction\tshadows\ttpr_mean\ttpr_std\ttnr_mean\t"
            "tnr_std\tpositives\tnegatives");
  const std::string summary = bench_summary_to_tsv(result);
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 5);
  const json doc = json::parse(bench_to_json(result));
  EXPECT_EQ(doc["schema"], kBenchReportSchema);
  EXPECT_EQ(doc["cells"].size(), 4u);
  EXPECT_EQ(bench_to_json(result), bench_to_json(bench_grid({target},
                                                            {plain_suspect(p.held_out, "ctrl0"),
                                                             plain_suspect(p.foreign, "ctrl3")},
                                                            grid)));
}

TEST(BenchGrid, Validation) {
  BenchGrid grid;
  grid.alphas.clear();
  EXPECT_THROW(grid.validate(), InvalidArgument);
  EXPECT_THROW(bench_grid({}, {}, BenchGrid{}), InvalidArgument);
}

}  // namespace
}  // namespace trajaudit
