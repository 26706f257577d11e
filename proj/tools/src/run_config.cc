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

#include "trajaudit/cli/run_config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "trajaudit/error.h"
#include "trajaudit/text_records.h"

namespace trajaudit::cli {
namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw InvalidArgument("invalid value '" + value + "' for " + key + ": expected " + expected);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    bad_value(key, value, "an unsigned integer");
  }
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& value, std::size_t min,
                        std::size_t max) {
  const std::uint64_t v = parse_u64(key, value);
  if (v < min || v > max) {
    bad_value(key, value,
              "an integer in [" + std::to_string(min) + ", " + std::to_string(max) + "]");
  }
  return static_cast<std::size_t>(v);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty() || !std::isfinite(out)) {
    bad_value(key, value, "a finite real number");
  }
  return out;
}

// Closed or half-open real range check.
double parse_real(const std::string& key, const std::string& value, double lo, double hi,
                  bool lo_open, bool hi_open) {
  const double v = parse_double(key, value);
  const bool lo_ok = lo_open ? v > lo : v >= lo;
  const bool hi_ok = hi_open ? v < hi : v <= hi;
  if (!lo_ok || !hi_ok) {
    bad_value(key, value,
              "a number in " + std::string(lo_open ? "(" : "[") + format_shortest(lo) + ", " +
                  format_shortest(hi) + (hi_open ? ")" : "]"));
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "true or false");
}

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  std::vector<std::string> items;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty()) bad_value(key, value, "a comma-separated list without empty items");
    items.push_back(item);
  }
  if (items.empty()) bad_value(key, value, "a non-empty comma-separated list");
  return items;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& value, F parse_item) {
  std::vector<T> out;
  for (const auto& item : split_list(key, value)) out.push_back(parse_item(item));
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F format) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format(values[i]);
  }
  return out;
}

std::string count_text(std::size_t v) { return std::to_string(v); }

std::vector<std::size_t> parse_hidden(const std::string& key, const std::string& value) {
  return parse_list<std::size_t>(key, value, [&](const std::string& item) {
    return parse_count(key, item, 1, 4096);
  });
}

// Wraps a parser so an InvalidArgument from an enum parser names the key.
template <typename F>
auto keyed(const std::string& key, const std::string& value, F parse) {
  try {
    return parse(value);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(key + ": " + e.what());
  }
}

struct Entry {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
};

constexpr std::size_t kMaxCount = 1'000'000;
constexpr double kHuge = 1e12;

const std::map<std::string, Entry>& entries() {
  static const std::map<std::string, Entry> table = [] {
    std::map<std::string, Entry> t;
    auto u64 = [&t](const std::string& name, std::uint64_t RunConfig::*field) {
      t[name] = {[field](const RunConfig& c) { return std::to_string(c.*field); },
                 [field](RunConfig& c, const std::string& k, const std::string& v) {
                   c.*field = parse_u64(k, v);
                 }};
    };
    auto count = [&t](const std::string& name, auto getter, std::size_t min,
                      std::size_t max) {
      t[name] = {[getter](const RunConfig& c) {
                   return std::to_string(getter(const_cast<RunConfig&>(c)));
                 },
                 [getter, min, max](RunConfig& c, const std::string& k, const std::string& v) {
                   getter(c) = parse_count(k, v, min, max);
                 }};
    };
    auto real = [&t](const std::string& name, auto getter, double lo, double hi,
                     bool lo_open, bool hi_open) {
      t[name] = {[getter](const RunConfig& c) {
                   return format_shortest(getter(const_cast<RunConfig&>(c)));
                 },
                 [=](RunConfig& c, const std::string& k, const std::string& v) {
                   getter(c) = parse_real(k, v, lo, hi, lo_open, hi_open);
                 }};
    };

    u64("seed", &RunConfig::seed);
    t["out"] = {[](const RunConfig& c) { return c.out.string(); },
                [](RunConfig& c, const std::string& k, const std::string& v) {
                  if (v.empty()) bad_value(k, v, "a directory path");
                  c.out = v;
                }};
    count("threads", [](RunConfig& c) -> std::size_t& { return c.threads; }, 0, 1024);

    real("env.dt", [](RunConfig& c) -> double& { return c.env.dt; }, 0.0, 10.0, true, false);
    count("env.horizon", [](RunConfig& c) -> std::size_t& { return c.env.horizon; }, 2,
          kMaxCount);
    real("env.c_pos", [](RunConfig& c) -> double& { return c.env.c_pos; }, 0.0, kHuge,
         false, false);
    real("env.c_act", [](RunConfig& c) -> double& { return c.env.c_act; }, 0.0, kHuge,
         false, false);
    t["env.terminal_at_horizon"] = {
        [](const RunConfig& c) { return std::string(c.env.terminal_at_horizon ? "true" : "false"); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.env.terminal_at_horizon = parse_bool(k, v);
        }};

    count("data.trajectories", [](RunConfig& c) -> std::size_t& { return c.trajectories; },
          1, kMaxCount);
    real("data.exploration_sigma",
         [](RunConfig& c) -> double& { return c.exploration_sigma; }, 0.0, 10.0, false,
         false);

    t["policy.hidden"] = {
        [](const RunConfig& c) { return join(c.policy.hidden, count_text); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.policy.hidden = parse_hidden(k, v);
        }};
    count("policy.epochs", [](RunConfig& c) -> std::size_t& { return c.policy.train.epochs; },
          0, kMaxCount);
    count("policy.batch_size",
          [](RunConfig& c) -> std::size_t& { return c.policy.train.batch_size; }, 1,
          kMaxCount);
    real("policy.lr", [](RunConfig& c) -> double& { return c.policy.train.lr; }, 0.0, 10.0,
         true, false);
    count("policy.lr_decay_every",
          [](RunConfig& c) -> std::size_t& { return c.policy.train.lr_decay_every; }, 0,
          kMaxCount);

    real("critic.gamma", [](RunConfig& c) -> double& { return c.critic.gamma; }, 0.0, 1.0,
         false, false);
    t["critic.hidden"] = {
        [](const RunConfig& c) { return join(c.critic.hidden, count_text); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.critic.hidden = parse_hidden(k, v);
        }};
    count("critic.epochs", [](RunConfig& c) -> std::size_t& { return c.critic.epochs; }, 0,
          kMaxCount);
    count("critic.batch_size", [](RunConfig& c) -> std::size_t& { return c.critic.batch_size; },
          1, kMaxCount);
    real("critic.lr", [](RunConfig& c) -> double& { return c.critic.lr; }, 0.0, 10.0, true,
         false);
    count("critic.lr_decay_every",
          [](RunConfig& c) -> std::size_t& { return c.critic.lr_decay_every; }, 0, kMaxCount);
    count("critic.target_sync_period",
          [](RunConfig& c) -> std::size_t& { return c.critic.target_sync_period; }, 1,
          kMaxCount);
    t["critic.mode"] = {[](const RunConfig& c) { return to_string(c.critic.mode); },
                        [](RunConfig& c, const std::string& k, const std::string& v) {
                          c.critic.mode = keyed(k, v, parse_critic_mode);
                        }};

    count("shadows.count", [](RunConfig& c) -> std::size_t& { return c.shadow_count; }, 2,
          10'000);
    u64("shadows.base_seed", &RunConfig::shadow_base_seed);
    u64("suspect.seed", &RunConfig::suspect_seed);

    count("ensemble.k", [](RunConfig& c) -> std::size_t& { return c.ensemble_k; }, 0, 1000);
    t["ensemble.mode"] = {[](const RunConfig& c) { return to_string(c.ensemble_mode); },
                          [](RunConfig& c, const std::string& k, const std::string& v) {
                            c.ensemble_mode = keyed(k, v, parse_ensemble_mode);
                          }};
    u64("ensemble.seed", &RunConfig::ensemble_seed);
    real("distort.sigma", [](RunConfig& c) -> double& { return c.distort_sigma; }, 0.0, 10.0,
         false, false);
    u64("distort.seed", &RunConfig::distort_seed);

    t["audit.metric"] = {[](const RunConfig& c) { return to_string(c.audit.metric); },
                         [](RunConfig& c, const std::string& k, const std::string& v) {
                           c.audit.metric = keyed(k, v, parse_distance_metric);
                         }};
    t["audit.tester"] = {[](const RunConfig& c) { return to_string(c.audit.tester); },
                         [](RunConfig& c, const std::string& k, const std::string& v) {
                           c.audit.tester = keyed(k, v, parse_tester);
                         }};
    real("audit.alpha", [](RunConfig& c) -> double& { return c.audit.alpha; }, 0.0, 1.0, true,
         true);
    count("audit.shadows", [](RunConfig& c) -> std::size_t& { return c.audit.shadow_count; },
          2, 10'000);
    real("audit.fraction", [](RunConfig& c) -> double& { return c.audit.fraction; }, 0.0, 1.0,
         true, false);
    count("audit.trajectories",
          [](RunConfig& c) -> std::size_t& { return c.audit.audited_trajectories; }, 1,
          kMaxCount);
    t["audit.normality_level"] = {
        [](const RunConfig& c) { return format_shortest(c.audit.normality_level); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          const double level = parse_double(k, v);
          keyed(k, v, [level](const std::string&) {
            return anderson_darling_critical_value(level);
          });
          c.audit.normality_level = level;
        }};
    t["audit.normality_policy"] = {
        [](const RunConfig& c) { return to_string(c.audit.normality_policy); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.audit.normality_policy = keyed(k, v, parse_normality_failure_policy);
        }};
    t["audit.grubbs_sample"] = {
        [](const RunConfig& c) { return to_string(c.audit.grubbs_sample); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.audit.grubbs_sample = keyed(k, v, parse_grubbs_sample);
        }};
    t["audit.target"] = {[](const RunConfig& c) { return c.target; },
                         [](RunConfig& c, const std::string& k, const std::string& v) {
                           if (v.empty()) bad_value(k, v, "a dataset name");
                           c.target = v;
                         }};
    t["audit.suspect"] = {[](const RunConfig& c) { return c.suspect; },
                          [](RunConfig& c, const std::string& k, const std::string& v) {
                            if (v.empty()) bad_value(k, v, "a dataset name or policy path");
                            c.suspect = v;
                          }};
    real("audit.tau", [](RunConfig& c) -> double& { return c.tau; }, 0.0, 1.0, true, false);

    t["bench.metrics"] = {
        [](const RunConfig& c) {
          return join(c.bench.metrics, [](DistanceMetric m) { return to_string(m); });
        },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.bench.metrics = parse_list<DistanceMetric>(k, v, [&](const std::string& item) {
            return keyed(k, item, parse_distance_metric);
          });
        }};
    t["bench.testers"] = {
        [](const RunConfig& c) {
          return join(c.bench.testers, [](Tester m) { return to_string(m); });
        },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.bench.testers = parse_list<Tester>(
              k, v, [&](const std::string& item) { return keyed(k, item, parse_tester); });
        }};
    t["bench.alphas"] = {
        [](const RunConfig& c) { return join(c.bench.alphas, format_shortest); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.bench.alphas = parse_list<double>(k, v, [&](const std::string& item) {
            return parse_real(k, item, 0.0, 1.0, true, true);
          });
        }};
    t["bench.fractions"] = {
        [](const RunConfig& c) { return join(c.bench.fractions, format_shortest); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.bench.fractions = parse_list<double>(k, v, [&](const std::string& item) {
            return parse_real(k, item, 0.0, 1.0, true, false);
          });
        }};
    t["bench.shadow_counts"] = {
        [](const RunConfig& c) { return join(c.bench.shadow_counts, count_text); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.bench.shadow_counts = parse_list<std::size_t>(
              k, v, [&](const std::string& item) { return parse_count(k, item, 2, 10'000); });
        }};
    return t;
  }();
  return table;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, entry] : entries()) keys.push_back(key);
  return keys;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  const auto it = entries().find(key);
  if (it == entries().end()) throw InvalidArgument("unknown key: " + key);
  it->second.set(config, key, value);
}

std::map<std::string, std::string> config_to_map(const RunConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& [key, entry] : entries()) out[key] = entry.get(config);
  return out;
}

void apply_config_text(RunConfig& config, const std::string& text,
                       const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, number, "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_config_value(config, key, value);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void validate_config(const RunConfig& config) {
  config.env.validate();
  config.critic.validate();
  if (config.audit.shadow_count > config.shadow_count) {
    throw InvalidArgument("audit.shadows (" + std::to_string(config.audit.shadow_count) +
                          ") exceeds shadows.count (" + std::to_string(config.shadow_count) +
                          ")");
  }
  for (std::size_t k : config.bench.shadow_counts) {
    if (k > config.shadow_count) {
      throw InvalidArgument("bench.shadow_counts entry " + std::to_string(k) +
                            " exceeds shadows.count (" + std::to_string(config.shadow_count) +
                            ")");
    }
  }
  if (config.ensemble_k == 1) throw InvalidArgument("ensemble.k must be 0 or at least 2");
  if (config.ensemble_k > config.trajectories) {
    throw InvalidArgument("ensemble.k exceeds data.trajectories");
  }
  config.audit.validate();
  config.bench.validate();
}

RunConfig parse_config(const std::optional<std::filesystem::path>& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig config;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw NotFound("config not found: " + path->string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    apply_config_text(config, buffer.str(), path->string());
  }
  for (const auto& [key, value] : overrides) set_config_value(config, key, value);
  validate_config(config);
  return config;
}

std::string config_to_text(const RunConfig& config) {
  std::string out;
  for (const auto& [key, value] : config_to_map(config)) out += key + " = " + value + "\n";
  return out;
}

}  // namespace trajaudit::cli
