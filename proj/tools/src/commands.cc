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

#include "trajaudit/cli/commands.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>

#include "trajaudit/audit.h"
#include "trajaudit/bench.h"
#include "trajaudit/critic.h"
#include "trajaudit/envgen.h"
#include "trajaudit/error.h"
#include "trajaudit/parallel.h"
#include "trajaudit/policy.h"
#include "trajaudit/rng.h"
#include "trajaudit/text_records.h"

namespace trajaudit::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kDatasetExt = ".dataset";

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string sanitize(const std::string& text) {
  std::string out = text;
  for (char& c : out) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
                      c == '.' || c == '+';
    if (!keep) c = '_';
  }
  return out;
}

std::vector<PolicyPtr> load_shadows(const Layout& layout, const RunConfig& config,
                                    const std::string& dataset, std::size_t count) {
  std::vector<PolicyPtr> shadows;
  shadows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    shadows.push_back(load_policy(layout.shadow(dataset, config.shadow_base_seed + i)));
  }
  return shadows;
}

// Suspect-side resolver for one target: binds exclude-source ensembles to
// the target and wraps every query in fresh per-trajectory distortion.
SuspectResolver suspect_resolver(const PolicyPtr& policy, const std::string& target,
                                 const std::string& suspect_tag, const RunConfig& config) {
  SuspectResolver resolver;
  if (auto ensemble = std::dynamic_pointer_cast<const EnsemblePolicy>(policy)) {
    resolver = ensemble_suspect(ensemble, target);
  } else {
    resolver = fixed_suspect(policy);
  }
  if (config.distort_sigma > 0.0) {
    const double sigma = config.distort_sigma;
    const std::uint64_t seed =
        derive_seed(derive_seed(config.distort_seed, target), suspect_tag);
    resolver = [inner = std::move(resolver), sigma, seed](TrajectoryId id) {
      return gaussian_distort(inner(id), sigma, derive_seed(seed, id));
    };
  }
  return resolver;
}

fs::path suspect_path(const Layout& layout, const RunConfig& config) {
  const std::string& s = config.suspect;
  if (s.find('/') != std::string::npos || fs::path(s).has_extension()) return s;
  return config.ensemble_k > 0 ? layout.ensemble(s) : layout.suspect(s);
}

std::string suspect_tag(const RunConfig& config) {
  const std::string& s = config.suspect;
  if (s.find('/') != std::string::npos || fs::path(s).has_extension()) {
    return fs::path(s).stem().string();
  }
  return s;
}

int gen_data(const RunConfig& config, std::ostream& log) {
  const Layout layout{config.out};
  const auto controllers = benchmark_controllers(config.exploration_sigma);
  const auto names = benchmark_dataset_names();
  for (std::size_t i = 0; i < controllers.size(); ++i) {
    const Dataset dataset = generate_dataset(config.env, controllers[i], config.trajectories,
                                             derive_seed(config.seed, names[i]), names[i]);
    save_dataset(dataset, layout.dataset(names[i]));
    log << "wrote " << layout.dataset(names[i]).string() << " (k_pos "
        << format_shortest(controllers[i].k_pos) << ", k_vel " << format_shortest(controllers[i].k_vel)
        << ", " << dataset.trajectories.size() << " trajectories, "
        << dataset.transition_count() << " transitions)\n";
  }
  return kExitOk;
}

int train_shadow_models(const RunConfig& config, std::ostream& log) {
  const Layout layout{config.out};
  for (const auto& name : layout.dataset_names()) {
    const Dataset dataset = load_dataset(layout.dataset(name));
    const auto shadows =
        train_shadows(dataset, config.shadow_count, config.policy, config.shadow_base_seed);
    for (std::size_t i = 0; i < shadows.size(); ++i) {
      save_policy(*shadows[i], layout.shadow(name, config.shadow_base_seed + i));
    }
    log << "wrote " << shadows.size() << " shadows for " << name << "\n";
    const PolicyPtr suspect = train_bc(dataset, config.policy, config.suspect_seed);
    save_policy(*suspect, layout.suspect(name));
    log << "wrote " << layout.suspect(name).string() << "\n";
    if (config.ensemble_k >= 2) {
      const auto ensemble =
          train_ensemble(dataset, config.ensemble_k, config.policy, config.ensemble_seed,
                         derive_seed(config.seed, "split/" + name), config.ensemble_mode);
      save_policy(*ensemble, layout.ensemble(name));
      log << "wrote " << layout.ensemble(name).string() << "\n";
    }
  }
  return kExitOk;
}

int train_critics(const RunConfig& config, std::ostream& log) {
  const Layout layout{config.out};
  for (const auto& name : layout.dataset_names()) {
    const Dataset dataset = load_dataset(layout.dataset(name));
    CriticConfig critic_config = config.critic;
    critic_config.seed = derive_seed(config.seed, "critic/" + name);
    const Critic critic = train_critic(dataset, critic_config);
    save_critic(critic, layout.critic(name));
    log << "wrote " << layout.critic(name).string() << " (loss "
        << format_shortest(critic.epoch_losses.front()) << " -> "
        << format_shortest(critic.epoch_losses.back()) << ", dropped "
        << critic.dropped_transitions << " truncated last steps)\n";
  }
  return kExitOk;
}

int audit(const RunConfig& config, std::ostream& log) {
  const Layout layout{config.out};
  const Dataset target = load_dataset(layout.dataset(config.target));
  const Critic critic = load_critic(layout.critic(config.target));
  const auto shadows = load_shadows(layout, config, config.target, config.audit.shadow_count);
  const PolicyPtr suspect = load_policy(suspect_path(layout, config));
  const std::string tag = suspect_tag(config);

  AuditConfig audit_config = config.audit;
  audit_config.seed = config.seed;
  const AuditReport report =
      audit_model(target, shadows, critic, suspect_resolver(suspect, target.name, tag, config),
                  suspect->label(), audit_config);
  ReportContext context;
  context.run_config = config_to_map(config);
  context.tau = config.tau;
  const fs::path path = layout.audit_report(target.name, tag + "_" + bench_variant(config));
  write_text(path, report_to_json(report, context));
  log << "audited " << report.verdicts.size() << " trajectories of " << target.name
      << " against " << suspect->label() << ": " << report.members() << " member, "
      << report.non_members() << " non-member, " << report.skipped()
      << " skipped; member fraction " << format_shortest(report.member_fraction())
      << "; pirated=" << (dataset_verdict(report, config.tau) ? "yes" : "no") << "\n";
  log << "wrote " << path.string() << "\n";
  return kExitOk;
}

int bench(const RunConfig& config, std::ostream& log) {
  const Layout layout{config.out};
  const auto names = layout.dataset_names();
  const std::size_t max_k =
      *std::max_element(config.bench.shadow_counts.begin(), config.bench.shadow_counts.end());

  std::vector<BenchTarget> targets;
  std::vector<BenchSuspect> suspects;
  for (const auto& name : names) {
    BenchTarget target;
    target.dataset = std::make_shared<const Dataset>(load_dataset(layout.dataset(name)));
    target.critic = std::make_shared<const Critic>(load_critic(layout.critic(name)));
    target.shadows = load_shadows(layout, config, name, max_k);
    targets.push_back(std::move(target));

    const PolicyPtr policy = load_policy(config.ensemble_k > 0 ? layout.ensemble(name)
                                                               : layout.suspect(name));
    BenchSuspect suspect;
    suspect.label = policy->label();
    suspect.source_dataset = name;
    suspect.resolver_for = [policy, name, &config](const std::string& target_name) {
      return suspect_resolver(policy, target_name, name, config);
    };
    suspects.push_back(std::move(suspect));
  }

  BenchGrid grid = config.bench;
  grid.audited_trajectories = config.audit.audited_trajectories;
  grid.normality_level = config.audit.normality_level;
  grid.normality_policy = config.audit.normality_policy;
  grid.grubbs_sample = config.audit.grubbs_sample;
  grid.seed = config.seed;
  grid.variant = bench_variant(config);

  const BenchResult result = bench_grid(targets, suspects, grid);
  const fs::path dir = layout.bench_dir(grid.variant);
  write_text(dir / "bench_report.json", bench_to_json(result, config_to_map(config)));
  write_text(dir / "bench_table.tsv", bench_to_tsv(result));
  write_text(dir / "bench_summary.tsv", bench_summary_to_tsv(result));
  for (const auto& s : result.summary) {
    log << to_string(s.setting.metric) << " " << to_string(s.setting.tester) << " alpha "
        << format_shortest(s.setting.alpha) << " fraction " << format_shortest(s.setting.fraction)
        << " k " << s.setting.shadow_count << ": TPR " << format_shortest(s.tpr.mean) << " TNR "
        << format_shortest(s.tnr.mean) << "\n";
  }
  log << "wrote " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

fs::path Layout::dataset(const std::string& name) const {
  return root / "datasets" / (name + kDatasetExt);
}

fs::path Layout::shadow(const std::string& dataset, std::uint64_t seed) const {
  return root / "shadows" / dataset / ("shadow_" + std::to_string(seed) + ".policy");
}

fs::path Layout::suspect(const std::string& dataset) const {
  return root / "suspects" / (dataset + ".policy");
}

fs::path Layout::ensemble(const std::string& dataset) const {
  return root / "ensembles" / (dataset + ".policy");
}

fs::path Layout::critic(const std::string& dataset) const {
  return root / "critics" / (dataset + ".critic");
}

fs::path Layout::audit_report(const std::string& target, const std::string& suspect) const {
  return root / "reports" / (sanitize(target) + "__" + sanitize(suspect) + ".json");
}

fs::path Layout::bench_dir(const std::string& variant) const {
  return root / "bench" / sanitize(variant);
}

std::vector<std::string> Layout::dataset_names() const {
  const fs::path dir = root / "datasets";
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == kDatasetExt) {
      names.push_back(entry.path().stem().string());
    }
  }
  if (names.empty()) throw NotFound("dataset not found: no datasets in " + dir.string());
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<std::string> benchmark_dataset_names() {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < benchmark_controllers().size(); ++i) {
    names.push_back("ctrl" + std::to_string(i));
  }
  return names;
}

std::string bench_variant(const RunConfig& config) {
  std::string variant;
  if (config.ensemble_k > 0) {
    variant = "ensemble" + std::to_string(config.ensemble_k) + "-" +
              to_string(config.ensemble_mode);
  }
  if (config.distort_sigma > 0.0) {
    if (!variant.empty()) variant += "+";
    variant += "gauss" + format_shortest(config.distort_sigma);
  }
  return variant.empty() ? "plain" : variant;
}

std::vector<std::string> subcommands() {
  return {"gen-data", "train-shadows", "train-critic", "audit", "bench"};
}

int run_command(const std::string& subcommand, const RunConfig& config, std::ostream& log,
                std::ostream& err) {
  static const std::map<std::string, std::function<int(const RunConfig&, std::ostream&)>>
      commands = {{"gen-data", gen_data},
                  {"train-shadows", train_shadow_models},
                  {"train-critic", train_critics},
                  {"audit", audit},
                  {"bench", bench}};
  const auto it = commands.find(subcommand);
  if (it == commands.end()) {
    err << "trajaudit: unknown subcommand '" << subcommand << "'\n";
    return kExitFailure;
  }
  try {
    validate_config(config);
    if (config.threads > 0) set_worker_count(config.threads);
    return it->second(config, log);
  } catch (const NotFound& e) {
    err << "trajaudit " << subcommand << ": " << e.what() << "\n";
    return kExitMissingArtifact;
  } catch (const std::exception& e) {
    err << "trajaudit " << subcommand << ": " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace trajaudit::cli
