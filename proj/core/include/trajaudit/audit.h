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

// Trajectory-level auditing: for every audited trajectory, compare the
// suspect's fingerprint distance from the shadow mean against the shadows'
// own distances with an outlier test, then aggregate into a report.

#ifndef TRAJAUDIT_AUDIT_H_
#define TRAJAUDIT_AUDIT_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajaudit/critic.h"
#include "trajaudit/data_model.h"
#include "trajaudit/fingerprint.h"
#include "trajaudit/policy.h"
#include "trajaudit/stats.h"

namespace trajaudit {

inline constexpr const char* kAuditReportSchema = "trajaudit.audit_report/1";

enum class Tester { kGrubbs, kThreeSigma };

std::string to_string(Tester tester);
Tester parse_tester(const std::string& text);

// What to do when the shadow distances fail the normality pre-check.
enum class NormalityFailurePolicy { kWarn, kSkipTrajectory };

std::string to_string(NormalityFailurePolicy policy);
NormalityFailurePolicy parse_normality_failure_policy(const std::string& text);

struct AuditConfig {
  DistanceMetric metric = DistanceMetric::kWasserstein;
  Tester tester = Tester::kGrubbs;
  double alpha = 0.01;
  std::size_t shadow_count = 15;
  double fraction = 1.0;
  std::size_t audited_trajectories = 50;
  double normality_level = 0.05;
  NormalityFailurePolicy normality_policy = NormalityFailurePolicy::kWarn;
  GrubbsSample grubbs_sample = GrubbsSample::kWithSuspect;
  // Seeds the audited-trajectory sample.
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Verdict { kMember, kNonMember, kSkipped };

std::string to_string(Verdict verdict);

struct TrajectoryVerdict {
  TrajectoryId trajectory = 0;
  std::vector<double> shadow_distances;
  double suspect_distance = 0.0;
  TestOutcome outcome;
  // Absent when there are fewer than 5 shadows or their distances have no
  // spread (the check is undefined there).
  std::optional<AndersonDarlingResult> normality;
  Verdict verdict = Verdict::kSkipped;
};

struct AuditReport {
  AuditConfig config;
  std::string target_dataset;
  std::string suspect_label;
  std::vector<TrajectoryVerdict> verdicts;  // ascending trajectory id

  std::size_t members() const;
  std::size_t non_members() const;
  std::size_t skipped() const;
  std::size_t normality_failures() const;
  // members / (members + non_members); 0 when every trajectory was skipped.
  double member_fraction() const;
};

// Audits one trajectory from its fingerprints. All fingerprints must have
// equal lengths and there must be k >= 2 shadows. The shadow mean never
// includes the suspect, and neither does the normality sample.
TrajectoryVerdict audit_trajectory(std::span<const Fingerprint> shadows,
                                   const Fingerprint& suspect,
                                   const AuditConfig& config);

// Uniform sample without replacement of `count` trajectory ids (all of them
// when count >= m), returned in ascending order.
std::vector<TrajectoryId> sample_audited_trajectories(const Dataset& dataset,
                                                      std::size_t count,
                                                      std::uint64_t seed);

// Full-length fingerprints of every shadow on a set of trajectories.
struct FingerprintBank {
  std::vector<TrajectoryId> trajectories;
  std::vector<std::size_t> lengths;                 // trajectory lengths
  std::vector<std::vector<Fingerprint>> shadows;    // [trajectory][shadow]
};

FingerprintBank collect_shadow_fingerprints(const Dataset& dataset,
                                            std::span<const PolicyPtr> shadows,
                                            const Critic& critic,
                                            std::span<const TrajectoryId> trajectories);

// Full-length suspect fingerprints, queried strictly in trajectory order so
// stochastic suspects are reproducible.
std::vector<Fingerprint> collect_suspect_fingerprints(
    const Dataset& dataset, const SuspectResolver& suspect, const Critic& critic,
    std::span<const TrajectoryId> trajectories);

// Audits pre-collected fingerprints: uses the first config.shadow_count
// shadows and the leading audited_length(n, config.fraction) values.
AuditReport audit_fingerprints(const FingerprintBank& bank,
                               std::span<const Fingerprint> suspect,
                               const AuditConfig& config,
                               std::string target_dataset, std::string suspect_label);

// End-to-end audit of one suspect against a target dataset: samples the
// audited trajectories, collects fingerprints and tests each trajectory.
// `shadows` must hold at least config.shadow_count policies.
AuditReport audit_model(const Dataset& target, std::span<const PolicyPtr> shadows,
                        const Critic& critic, const SuspectResolver& suspect,
                        std::string suspect_label, const AuditConfig& config);
AuditReport audit_model(const Dataset& target, std::span<const PolicyPtr> shadows,
                        const Critic& critic, const PolicyPtr& suspect,
                        const AuditConfig& config);

// Dataset-level piracy claim: member fraction >= tau, 0 < tau <= 1.
bool dataset_verdict(const AuditReport& report, double tau);

struct ReportContext {
  // Fully resolved run configuration, echoed verbatim.
  std::map<std::string, std::string> run_config;
  std::optional<double> tau;
};

// Deterministic JSON document (sorted keys, schema kAuditReportSchema).
std::string report_to_json(const AuditReport& report, const ReportContext& context = {});

}  // namespace trajaudit

#endif  // TRAJAUDIT_AUDIT_H_
