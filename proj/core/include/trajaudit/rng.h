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

#ifndef TRAJAUDIT_RNG_H_
#define TRAJAUDIT_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace trajaudit {

// Mixes a parent seed with a stream index into an independent child seed
// (splitmix64 finalizer). Used everywhere a per-item stream is needed so that
// results never depend on iteration or scheduling order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

// Seeded generator with fully specified output distributions. The standard
// <random> distributions are implementation-defined, so uniform and normal
// draws are computed here directly from the 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double low, double high) {
    return low + (high - low) * uniform();
  }
  // Standard normal via Box-Muller; one engine pair per draw.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace trajaudit

#endif  // TRAJAUDIT_RNG_H_
