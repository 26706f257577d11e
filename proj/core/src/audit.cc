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
#include <numeric>

#include "json.hpp"
#include "trajaudit/error.h"
#include "trajaudit/parallel.h"
#include "trajaudit/rng.h"

namespace trajaudit {
namespace {

using nlohmann::json;

json real_or_null(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

json config_to_json(const AuditConfig& c) {
  return {
      {"metric", to_string(c.metric)},
      {"tester", to_string(c.tester)},
      {"alpha", c.alpha},
      {"shadow_count", c.shadow_count},
      {"fraction", c.fraction},
      {"audited_trajectories", c.audited_trajectories},
      {"normality_level", c.normality_level},
      {"normality_policy", to_string(c.normality_policy)},
      {"grubbs_sample", to_string(c.grubbs_sample)},
      {"seed", c.seed},
  };
}

json verdict_to_json(const TrajectoryVerdict& v) {
  json out = {
      {"trajectory", v.trajectory},
      {"verdict", to_string(v.verdict)},
      {"suspect_distance", real_or_null(v.suspect_distance)},
      {"shadow_distances", v.shadow_distances},
      {"test",
       {{"statistic", real_or_null(v.outcome.statistic)},
        {"threshold", real_or_null(v.outcome.threshold)},
        {"is_outlier", v.outcome.is_outlier},
        {"sample_size", v.outcome.sample_size},
        {"mean", v.outcome.mean},
        {"stddev", v.outcome.stddev},
        {"degenerate", v.outcome.degenerate}}},
  };
  if (v.normality) {
    out["normality"] = {{"statistic", v.normality->statistic},
                        {"adjusted", v.normality->adjusted},
                        {"critical_value", v.normality->critical_value},
                        {"level", v.normality->level},
                        {"passes", v.normality->passes}};
  } else {
    out["normality"] = nullptr;
  }
  return out;
}

}  // namespace

std::string to_string(Tester tester) {
  return tester == Tester::kGrubbs ? "grubbs" : "three-sigma";
}

Tester parse_tester(const std::string& text) {
  if (text == "grubbs") return Tester::kGrubbs;
  if (text == "three-sigma" || text == "3sigma") return Tester::kThreeSigma;
  throw InvalidArgument("unknown tester '" + text + "' (expected grubbs or three-sigma)");
}

std::string to_string(NormalityFailurePolicy policy) {
  return policy == NormalityFailurePolicy::kWarn ? "warn" : "skip-trajectory";
}

NormalityFailurePolicy parse_normality_failure_policy(const std::string& text) {
  if (text == "warn") return NormalityFailurePolicy::kWarn;
  if (text == "skip-trajectory") return NormalityFailurePolicy::kSkipTrajectory;
  throw InvalidArgument("unknown normality policy '" + text +
                        "' (expected warn or skip-trajectory)");
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kMember: return "member";
    case Verdict::kNonMember: return "non-member";
    case Verdict::kSkipped: return "skipped";
  }
  return "?";
}

void AuditConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("audit: alpha must lie in (0, 1)");
  if (shadow_count < 2) throw InvalidArgument("audit: need at least 2 shadow models");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("audit: trajectory fraction must lie in (0, 1]");
  }
  if (audited_trajectories == 0) throw InvalidArgument("audit: audited trajectory count must be >= 1");
  anderson_darling_critical_value(normality_level);
}

std::size_t AuditReport::members() const {
  return static_cast<std::size_t>(std::count_if(
      verdicts.begin(), verdicts.end(),
      [](const TrajectoryVerdict& v) { return v.verdict == Verdict::kMember; }));
}

std::size_t AuditReport::non_members() const {
  return static_cast<std::size_t>(std::count_if(
      verdicts.begin(), verdicts.end(),
      [](const TrajectoryVerdict& v) { return v.verdict == Verdict::kNonMember; }));
}

std::size_t AuditReport::skipped() const {
  return static_cast<std::size_t>(std::count_if(
      verdicts.begin(), verdicts.end(),
      [](const TrajectoryVerdict& v) { return v.verdict == Verdict::kSkipped; }));
}

std::size_t AuditReport::normality_failures() const {
  return static_cast<std::size_t>(
      std::count_if(verdicts.begin(), verdicts.end(), [](const TrajectoryVerdict& v) {
        return v.normality && !v.normality->passes;
      }));
}

double AuditReport::member_fraction() const {
  const std::size_t decided = members() + non_members();
  if (decided == 0) return 0.0;
  return static_cast<double>(members()) / static_cast<double>(decided);
}

TrajectoryVerdict audit_trajectory(std::span<const Fingerprint> shadows,
                                   const Fingerprint& suspect,
                                   const AuditConfig& config) {
  if (shadows.size() < 2) throw InvalidArgument("audit_trajectory: need k >= 2 shadows");
  const std::vector<double> mean = mean_fingerprint(shadows);
  if (suspect.values.size() != mean.size()) {
    throw InvalidArgument("audit_trajectory: suspect fingerprint length " +
                          std::to_string(suspect.values.size()) +
                          " differs from shadow length " + std::to_string(mean.size()));
  }

  TrajectoryVerdict result;
  result.trajectory = shadows.front().trajectory;
  result.shadow_distances.reserve(shadows.size());
  for (const auto& shadow : shadows) {
    result.shadow_distances.push_back(distance(config.metric, shadow.values, mean));
  }
  result.suspect_distance = distance(config.metric, suspect.values, mean);

  const auto& d = result.shadow_distances;
  const bool spread = std::adjacent_find(d.begin(), d.end(), std::not_equal_to<>()) != d.end();
  if (d.size() >= 5 && spread) {
    result.normality = anderson_darling_normal(d, config.normality_level);
  }

  result.outcome = config.tester == Tester::kGrubbs
                       ? grubbs_decide(d, result.suspect_distance, config.alpha,
                                       config.grubbs_sample)
                       : three_sigma_decide(d, result.suspect_distance);
  result.verdict = result.outcome.is_outlier ? Verdict::kNonMember : Verdict::kMember;
  if (config.normality_policy == NormalityFailurePolicy::kSkipTrajectory &&
      result.normality && !result.normality->passes) {
    result.verdict = Verdict::kSkipped;
  }
  return result;
}

std::vector<TrajectoryId> sample_audited_trajectories(const Dataset& dataset,
                                                      std::size_t count,
                                                      std::uint64_t seed) {
  std::vector<TrajectoryId> ids;
  ids.reserve(dataset.trajectories.size());
  for (const auto& trajectory : dataset.trajectories) ids.push_back(trajectory.id);
  const std::size_t take = std::min(count, ids.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    std::swap(ids[i], ids[i + rng.below(ids.size() - i)]);
  }
  ids.resize(take);
  std::sort(ids.begin(), ids.end());
  return ids;
}

FingerprintBank collect_shadow_fingerprints(const Dataset& dataset,
                                            std::span<const PolicyPtr> shadows,
                                            const Critic& critic,
                                            std::span<const TrajectoryId> trajectories) {
  FingerprintBank bank;
  bank.trajectories.assign(trajectories.begin(), trajectories.end());
  bank.lengths.resize(trajectories.size());
  bank.shadows.resize(trajectories.size());
  parallel_for(trajectories.size(), [&](std::size_t j) {
    const Trajectory* trajectory = dataset.find(trajectories[j]);
    if (trajectory == nullptr) {
      throw InvalidArgument("trajectory " + std::to_string(trajectories[j]) +
                            " not in dataset '" + dataset.name + "'");
    }
    bank.lengths[j] = trajectory->size();
    bank.shadows[j].reserve(shadows.size());
    for (const auto& shadow : shadows) {
      bank.shadows[j].push_back(collect_fingerprint(*shadow, critic, *trajectory, 1.0));
    }
  });
  return bank;
}

std::vector<Fingerprint> collect_suspect_fingerprints(
    const Dataset& dataset, const SuspectResolver& suspect, const Critic& critic,
    std::span<const TrajectoryId> trajectories) {
  std::vector<Fingerprint> fingerprints;
  fingerprints.reserve(trajectories.size());
  for (TrajectoryId id : trajectories) {
    const Trajectory* trajectory = dataset.find(id);
    if (trajectory == nullptr) {
      throw InvalidArgument("trajectory " + std::to_string(id) + " not in dataset '" +
                            dataset.name + "'");
    }
    const PolicyPtr policy = suspect(id);
    if (!policy) throw InvalidArgument("suspect resolver returned no policy");
    fingerprints.push_back(collect_fingerprint(*policy, critic, *trajectory, 1.0));
  }
  return fingerprints;
}

AuditReport audit_fingerprints(const FingerprintBank& bank,
                               std::span<const Fingerprint> suspect,
                               const AuditConfig& config, std::string target_dataset,
                               std::string suspect_label) {
  config.validate();
  if (suspect.size() != bank.trajectories.size()) {
    throw InvalidArgument("audit: suspect fingerprint count does not match bank");
  }
  AuditReport report;
  report.config = config;
  report.target_dataset = std::move(target_dataset);
  report.suspect_label = std::move(suspect_label);
  report.verdicts.resize(bank.trajectories.size());
  for (std::size_t j = 0; j < bank.trajectories.size(); ++j) {
    if (bank.shadows[j].size() < config.shadow_count) {
      throw InvalidArgument("audit: " + std::to_string(config.shadow_count) +
                            " shadows requested but only " +
                            std::to_string(bank.shadows[j].size()) + " available");
    }
    const std::size_t length = audited_length(bank.lengths[j], config.fraction);
    std::vector<Fingerprint> shadows;
    shadows.reserve(config.shadow_count);
    for (std::size_t i = 0; i < config.shadow_count; ++i) {
      shadows.push_back(prefix(bank.shadows[j][i], length));
    }
    report.verdicts[j] = audit_trajectory(shadows, prefix(suspect[j], length), config);
  }
  std::sort(report.verdicts.begin(), report.verdicts.end(),
            [](const auto& a, const auto& b) { return a.trajectory < b.trajectory; });
  return report;
}

AuditReport audit_model(const Dataset& target, std::span<const PolicyPtr> shadows,
                        const Critic& critic, const SuspectResolver& suspect,
                        std::string suspect_label, const AuditConfig& config) {
  config.validate();
  if (shadows.size() < config.shadow_count) {
    throw InvalidArgument("audit_model: " + std::to_string(config.shadow_count) +
                          " shadows requested but only " + std::to_string(shadows.size()) +
                          " given");
  }
  const std::vector<TrajectoryId> ids =
      sample_audited_trajectories(target, config.audited_trajectories, config.seed);
  const FingerprintBank bank = collect_shadow_fingerprints(
      target, shadows.first(config.shadow_count), critic, ids);
  const std::vector<Fingerprint> suspect_fps =
      collect_suspect_fingerprints(target, suspect, critic, ids);
  return audit_fingerprints(bank, suspect_fps, config, target.name, std::move(suspect_label));
}

AuditReport audit_model(const Dataset& target, std::span<const PolicyPtr> shadows,
                        const Critic& critic, const PolicyPtr& suspect,
                        const AuditConfig& config) {
  if (!suspect) throw InvalidArgument("audit_model: null suspect");
  return audit_model(target, shadows, critic, fixed_suspect(suspect), suspect->label(),
                     config);
}

bool dataset_verdict(const AuditReport& report, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidArgument("dataset_verdict: tau must lie in (0, 1]");
  return report.member_fraction() >= tau;
}

std::string report_to_json(const AuditReport& report, const ReportContext& context) {
  json doc;
  doc["schema"] = kAuditReportSchema;
  doc["config"] = config_to_json(report.config);
  doc["target_dataset"] = report.target_dataset;
  doc["suspect"] = report.suspect_label;
  doc["summary"] = {
      {"audited", report.verdicts.size()},
      {"members", report.members()},
      {"non_members", report.non_members()},
      {"skipped", report.skipped()},
      {"normality_failures", report.normality_failures()},
      {"member_fraction", report.member_fraction()},
  };
  if (context.tau) {
    doc["dataset_verdict"] = {{"tau", *context.tau},
                              {"pirated", dataset_verdict(report, *context.tau)}};
  }
  if (!context.run_config.empty()) doc["run_config"] = context.run_config;
  json trajectories = json::array();
  for (const auto& v : report.verdicts) trajectories.push_back(verdict_to_json(v));
  doc["trajectories"] = std::move(trajectories);
  return doc.dump(2) + "\n";
}

}  // namespace trajaudit
