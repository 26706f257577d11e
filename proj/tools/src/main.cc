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

// trajaudit: generate data, train shadows and critics, audit suspects and
// run the TPR/TNR benchmark grid.

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "trajaudit/cli/commands.h"
#include "trajaudit/cli/run_config.h"
#include "trajaudit/error.h"

int main(int argc, char** argv) {
  namespace cli = trajaudit::cli;
  CLI::App app{"Trajectory-level dataset auditing for offline reinforcement learning"};
  app.set_help_all_flag("--help-all", "Print help for every option and exit");

  std::string command;
  app.add_option("command", command, "Subcommand to run")
      ->required()
      ->check(CLI::IsMember(cli::subcommands()));

  std::string config_path;
  app.add_option("--config", config_path, "key=value run configuration file");

  // Each flag is kept as text and validated by the config parser.
  struct Flag {
    const char* name;
    const char* help;
    std::vector<const char*> keys;
    std::string value;
  };
  std::vector<Flag> flags = {
      {"--seed", "Master seed", {"seed"}, {}},
      {"--out", "Output directory", {"out"}, {}},
      {"--metric", "Distance metric (l1, l2, cosine, wasserstein)",
       {"audit.metric", "bench.metrics"}, {}},
      {"--tester", "Outlier test (grubbs, three-sigma)", {"audit.tester", "bench.testers"}, {}},
      {"--alpha", "Grubbs significance level", {"audit.alpha", "bench.alphas"}, {}},
      {"--shadows", "Shadow models used by the audit", {"audit.shadows", "bench.shadow_counts"},
       {}},
      {"--fraction", "Audited trajectory prefix fraction", {"audit.fraction", "bench.fractions"},
       {}},
      {"--distort-sigma", "Gaussian action distortion of suspects", {"distort.sigma"}, {}},
      {"--ensemble-k", "Ensemble-defended suspects with K sub-models", {"ensemble.k"}, {}},
      {"--target", "Target dataset name for audit", {"audit.target"}, {}},
      {"--suspect", "Suspect dataset name or policy path for audit", {"audit.suspect"}, {}},
  };
  for (auto& flag : flags) app.add_option(flag.name, flag.value, flag.help);

  std::vector<std::string> assignments;
  app.add_option("--set", assignments, "Override any config key (key=value), repeatable");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  CLI11_PARSE(app, argc, argv);

  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& assignment : assignments) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
      std::cerr << "trajaudit: --set expects key=value, got '" << assignment << "'\n";
      return cli::kExitFailure;
    }
    overrides.emplace_back(assignment.substr(0, eq), assignment.substr(eq + 1));
  }
  for (const auto& flag : flags) {
    if (app.count(flag.name) == 0) continue;
    for (const char* key : flag.keys) overrides.emplace_back(key, flag.value);
  }

  cli::RunConfig config;
  try {
    std::optional<std::filesystem::path> path;
    if (!config_path.empty()) path = config_path;
    config = cli::parse_config(path, overrides);
  } catch (const trajaudit::NotFound& e) {
    std::cerr << "trajaudit: " << e.what() << "\n";
    return cli::kExitMissingArtifact;
  } catch (const trajaudit::Error& e) {
    std::cerr << "trajaudit: " << e.what() << "\n";
    return cli::kExitFailure;
  }
  if (print_config) {
    std::cout << cli::config_to_text(config);
    return cli::kExitOk;
  }
  return cli::run_command(command, config, std::cout, std::cerr);
}
