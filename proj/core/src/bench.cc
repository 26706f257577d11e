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

#include "trajaudit/bench.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "trajaudit/error.h"
#include "trajaudit/parallel.h"
#include "trajaudit/rng.h"
#include "trajaudit/text_records.h"

namespace trajaudit {
namespace {

using nlohmann::json;

// Running sum of 0/1 indicators.
struct Tally {
  std::size_t hits = 0;
  std::size_t total = 0;

  RateSummary summary() const {
    RateSummary s;
    s.count = total;
    if (total == 0) return s;
    s.mean = static_cast<double>(hits) / static_cast<double>(total);
    s.stddev = std::sqrt(s.mean * (1.0 - s.mean));
    return s;
  }
};

double population_stddev(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

std::vector<BenchSetting> settings_of(const BenchGrid& grid) {
  std::vector<BenchSetting> out;
  for (auto metric : grid.metrics) {
    for (auto tester : grid.testers) {
      for (double alpha : grid.alphas) {
        for (double fraction : grid.fractions) {
          for (std::size_t k : grid.shadow_counts) {
            out.push_back({metric, tester, alpha, fraction, k});
          }
        }
      }
    }
  }
  return out;
}

json rate_to_json(const RateSummary& r) {
  return {{"mean", r.mean}, {"std", r.stddev}, {"count", r.count}};
}

json setting_to_json(const BenchSetting& s) {
  return {{"metric", to_string(s.metric)},
          {"tester", to_string(s.tester)},
          {"alpha", s.alpha},
          {"fraction", s.fraction},
          {"shadow_count", s.shadow_count}};
}

std::string setting_columns(const BenchSetting& s) {
  return to_string(s.metric) + '\t' + to_string(s.tester) + '\t' + format_shortest(s.alpha) +
         '\t' + format_shortest(s.fraction) + '\t' + std::to_string(s.shadow_count);
}

std::string rate_columns(const RateSummary& r) {
  return format_shortest(r.mean) + '\t' + format_shortest(r.stddev);
}

}  // namespace

BenchSuspect plain_suspect(PolicyPtr policy, std::string source_dataset) {
  if (!policy) throw InvalidArgument("plain_suspect: null policy");
  BenchSuspect suspect;
  suspect.label = policy->label();
  suspect.source_dataset = std::move(source_dataset);
  suspect.resolver_for = [policy](const std::string&) { return fixed_suspect(policy); };
  return suspect;
}

void BenchGrid::validate() const {
  if (metrics.empty() || testers.empty() || alphas.empty() || fractions.empty() ||
      shadow_counts.empty()) {
    throw InvalidArgument("bench: every grid axis needs at least one value");
  }
  AuditConfig probe;
  probe.audited_trajectories = audited_trajectories;
  probe.normality_level = normality_level;
  for (double alpha : alphas) {
    probe.alpha = alpha;
    probe.validate();
  }
  for (double fraction : fractions) {
    probe.fraction = fraction;
    probe.validate();
  }
  for (std::size_t k : shadow_counts) {
    probe.shadow_count = k;
    probe.validate();
  }
}

const BenchSummary& BenchResult::find(const BenchSetting& setting) const {
  for (const auto& s : summary) {
    if (s.setting == setting) return s;
  }
  throw NotFound("bench: setting not in grid");
}

BenchResult bench_grid(const std::vector<BenchTarget>& targets,
                       const std::vector<BenchSuspect>& suspects,
                       const BenchGrid& grid) {
  grid.validate();
  if (targets.empty()) throw InvalidArgument("bench: no target datasets");
  if (suspects.empty()) throw InvalidArgument("bench: no suspects");
  const std::size_t max_k =
      *std::max_element(grid.shadow_counts.begin(), grid.shadow_counts.end());
  const std::vector<BenchSetting> settings = settings_of(grid);

  BenchResult result;
  result.grid = grid;
  std::vector<Tally> pooled_tpr(settings.size()), pooled_tnr(settings.size());
  std::vector<std::vector<double>> cell_tpr(settings.size()), cell_tnr(settings.size());

  for (const auto& target : targets) {
    if (!target.dataset || !target.critic) {
      throw InvalidArgument("bench: target is missing its dataset or critic");
    }
    const Dataset& dataset = *target.dataset;
    if (target.shadows.size() < max_k) {
      throw InvalidArgument("bench: target '" + dataset.name + "' has " +
                            std::to_string(target.shadows.size()) + " shadows, grid needs " +
                            std::to_string(max_k));
    }
    const std::vector<TrajectoryId> ids = sample_audited_trajectories(
        dataset, grid.audited_trajectories, derive_seed(grid.seed, dataset.name));
    const std::vector<PolicyPtr> shadows(target.shadows.begin(),
                                         target.shadows.begin() + static_cast<long>(max_k));
    const FingerprintBank bank =
        collect_shadow_fingerprints(dataset, shadows, *target.critic, ids);

    std::vector<std::vector<Fingerprint>> suspect_fps(suspects.size());
    parallel_for(suspects.size(), [&](std::size_t s) {
      suspect_fps[s] = collect_suspect_fingerprints(
          dataset, suspects[s].resolver_for(dataset.name), *target.critic, ids);
    });

    for (std::size_t c = 0; c < settings.size(); ++c) {
      const BenchSetting& setting = settings[c];
      AuditConfig config;
      config.metric = setting.metric;
      config.tester = setting.tester;
      config.alpha = setting.alpha;
      config.fraction = setting.fraction;
      config.shadow_count = setting.shadow_count;
      config.audited_trajectories = grid.audited_trajectories;
      config.normality_level = grid.normality_level;
      config.normality_policy = grid.normality_policy;
      config.grubbs_sample = grid.grubbs_sample;

      BenchCell cell;
      cell.target = dataset.name;
      cell.setting = setting;
      Tally tpr, tnr;
      for (std::size_t s = 0; s < suspects.size(); ++s) {
        const AuditReport report = audit_fingerprints(bank, suspect_fps[s], config,
                                                      dataset.name, suspects[s].label);
        SuspectRate rate;
        rate.label = suspects[s].label;
        rate.positive = suspects[s].source_dataset == dataset.name;
        rate.members = report.members();
        rate.non_members = report.non_members();
        rate.skipped = report.skipped();
        const std::size_t decided = rate.members + rate.non_members;
        const std::size_t correct = rate.positive ? rate.members : rate.non_members;
        rate.accuracy =
            decided == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(decided);
        Tally& tally = rate.positive ? tpr : tnr;
        tally.hits += correct;
        tally.total += decided;
        if (s == 0) cell.normality_failures = report.normality_failures();
        cell.suspects.push_back(std::move(rate));
      }
      cell.tpr = tpr.summary();
      cell.tnr = tnr.summary();
      pooled_tpr[c].hits += tpr.hits;
      pooled_tpr[c].total += tpr.total;
      pooled_tnr[c].hits += tnr.hits;
      pooled_tnr[c].total += tnr.total;
      if (tpr.total > 0) cell_tpr[c].push_back(cell.tpr.mean);
      if (tnr.total > 0) cell_tnr[c].push_back(cell.tnr.mean);
      result.cells.push_back(std::move(cell));
    }
  }

  for (std::size_t c = 0; c < settings.size(); ++c) {
    BenchSummary s;
    s.setting = settings[c];
    s.tpr = pooled_tpr[c].summary();
    s.tnr = pooled_tnr[c].summary();
    s.tpr_target_stddev = population_stddev(cell_tpr[c]);
    s.tnr_target_stddev = population_stddev(cell_tnr[c]);
    result.summary.push_back(s);
  }
  return result;
}

std::string bench_to_json(const BenchResult& result,
                          const std::map<std::string, std::string>& run_config) {
  const BenchGrid& g = result.grid;
  json grid = {
      {"audited_trajectories", g.audited_trajectories},
      {"normality_level", g.normality_level},
      {"normality_policy", to_string(g.normality_policy)},
      {"grubbs_sample", to_string(g.grubbs_sample)},
      {"seed", g.seed},
      {"variant", g.variant},
      {"alphas", g.alphas},
      {"fractions", g.fractions},
      {"shadow_counts", g.shadow_counts},
  };
  grid["metrics"] = json::array();
  for (auto m : g.metrics) grid["metrics"].push_back(to_string(m));
  grid["testers"] = json::array();
  for (auto t : g.testers) grid["testers"].push_back(to_string(t));

  json cells = json::array();
  for (const auto& cell : result.cells) {
    json suspects = json::array();
    for (const auto& s : cell.suspects) {
      suspects.push_back({{"label", s.label},
                          {"positive", s.positive},
                          {"accuracy", s.accuracy},
                          {"members", s.members},
                          {"non_members", s.non_members},
                          {"skipped", s.skipped}});
    }
    cells.push_back({{"target", cell.target},
                     {"setting", setting_to_json(cell.setting)},
                     {"tpr", rate_to_json(cell.tpr)},
                     {"tnr", rate_to_json(cell.tnr)},
                     {"normality_failures", cell.normality_failures},
                     {"suspects", std::move(suspects)}});
  }
  json summary = json::array();
  for (const auto& s : result.summary) {
    summary.push_back({{"setting", setting_to_json(s.setting)},
                       {"tpr", rate_to_json(s.tpr)},
                       {"tnr", rate_to_json(s.tnr)},
                       {"tpr_target_std", s.tpr_target_stddev},
                       {"tnr_target_std", s.tnr_target_stddev}});
  }
  json doc = {{"schema", kBenchReportSchema},
              {"grid", std::move(grid)},
              {"cells", std::move(cells)},
              {"summary", std::move(summary)}};
  if (!run_config.empty()) doc["run_config"] = run_config;
  return doc.dump(2) + "\n";
}

std::string bench_to_tsv(const BenchResult& result) {
  std::ostringstream out;
  out << "target\tmetric\ttester\talpha\tfraction\tshadows\ttpr_mean\ttpr_std\t"
         "tnr_mean\ttnr_std\tpositives\tnegatives\n";
  for (const auto& cell : result.cells) {
    out << cell.target << '\t' << setting_columns(cell.setting) << '\t'
        << rate_columns(cell.tpr) << '\t' << rate_columns(cell.tnr) << '\t' << cell.tpr.count
        << '\t' << cell.tnr.count << '\n';
  }
  return out.str();
}

std::string bench_summary_to_tsv(const BenchResult& result) {
  std::ostringstream out;
  out << "metric\ttester\talpha\tfraction\tshadows\ttpr_mean\ttpr_std\ttnr_mean\ttnr_std\t"
         "tpr_target_std\ttnr_target_std\tpositives\tnegatives\n";
  for (const auto& s : result.summary) {
    out << setting_columns(s.setting) << '\t' << rate_columns(s.tpr) << '\t'
        << rate_columns(s.tnr) << '\t' << format_shortest(s.tpr_target_stddev) << '\t'
        << format_shortest(s.tnr_target_stddev) << '\t' << s.tpr.count << '\t' << s.tnr.count
        << '\n';
  }
  return out.str();
}

}  // namespace trajaudit
