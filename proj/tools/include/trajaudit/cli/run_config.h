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

// Run configuration for the command-line tool: a flat key=value document
// layered as built-in defaults < config file < command-line overrides.

#ifndef TRAJAUDIT_CLI_RUN_CONFIG_H_
#define TRAJAUDIT_CLI_RUN_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trajaudit/audit.h"
#include "trajaudit/bench.h"
#include "trajaudit/critic.h"
#include "trajaudit/envgen.h"
#include "trajaudit/policy.h"

namespace trajaudit::cli {

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out = "trajaudit-out";
  std::size_t threads = 0;  // 0: one per hardware thread

  LinearControlEnv env;
  std::size_t trajectories = 100;
  double exploration_sigma = 0.05;

  PolicyNetConfig policy;
  CriticConfig critic;

  std::size_t shadow_count = 21;  // shadows trained per dataset
  std::uint64_t shadow_base_seed = 42;
  std::uint64_t suspect_seed = 142;

  std::size_t ensemble_k = 0;  // 0: no ensemble suspects
  EnsembleMode ensemble_mode = EnsembleMode::kExcludeSource;
  std::uint64_t ensemble_seed = 500;

  double distort_sigma = 0.0;
  std::uint64_t distort_seed = 7;

  AuditConfig audit;
  std::string target = "ctrl0";
  std::string suspect = "ctrl0";
  double tau = 0.5;

  BenchGrid bench{.metrics = {DistanceMetric::kL1, DistanceMetric::kL2,
                             DistanceMetric::kCosine, DistanceMetric::kWasserstein}};
};

// Sorted list of every recognised key.
std::vector<std::string> config_keys();

// Applies one key=value assignment. Throws InvalidArgument with
// "unknown key: <key>" or a range diagnostic.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

// Key -> canonical value text for every key; loading this map back yields
// an identical configuration.
std::map<std::string, std::string> config_to_map(const RunConfig& config);

// Reads a key=value document. Blank lines and '#' comments are ignored.
void apply_config_text(RunConfig& config, const std::string& text,
                       const std::string& source);

// Defaults, then the file (if any), then the overrides in order; finishes
// with cross-field checks.
RunConfig parse_config(const std::optional<std::filesystem::path>& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

void validate_config(const RunConfig& config);

// Renders the config as a loadable key=value document.
std::string config_to_text(const RunConfig& config);

}  // namespace trajaudit::cli

#endif  // TRAJAUDIT_CLI_RUN_CONFIG_H_
