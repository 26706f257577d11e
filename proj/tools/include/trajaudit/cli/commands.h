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

// Subcommands of the command-line tool and the on-disk artifact layout they
// share.

#ifndef TRAJAUDIT_CLI_COMMANDS_H_
#define TRAJAUDIT_CLI_COMMANDS_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "trajaudit/cli/run_config.h"

namespace trajaudit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitMissingArtifact = 2;

// Artifact paths below the output directory.
struct Layout {
  std::filesystem::path root;

  std::filesystem::path dataset(const std::string& name) const;
  std::filesystem::path shadow(const std::string& dataset, std::uint64_t seed) const;
  std::filesystem::path suspect(const std::string& dataset) const;
  std::filesystem::path ensemble(const std::string& dataset) const;
  std::filesystem::path critic(const std::string& dataset) const;
  std::filesystem::path audit_report(const std::string& target,
                                     const std::string& suspect) const;
  std::filesystem::path bench_dir(const std::string& variant) const;

  // Names of the stored datasets, sorted. Throws NotFound when none exist.
  std::vector<std::string> dataset_names() const;
};

// Names of the benchmark datasets written by gen-data.
std::vector<std::string> benchmark_dataset_names();

// Bench variant name derived from the suspect-side settings.
std::string bench_variant(const RunConfig& config);

std::vector<std::string> subcommands();

// Runs one subcommand. Progress goes to `log`, diagnostics to `err`.
// Returns kExitMissingArtifact when a prerequisite artifact is absent and
// kExitFailure for any other error.
int run_command(const std::string& subcommand, const RunConfig& config, std::ostream& log,
                std::ostream& err);

}  // namespace trajaudit::cli

#endif  // TRAJAUDIT_CLI_COMMANDS_H_
