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

// Small synthetic inputs shared by the unit tests.

#ifndef TRAJAUDIT_TESTS_FIXTURES_H_
#define TRAJAUDIT_TESTS_FIXTURES_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "trajaudit/data_model.h"

namespace trajaudit::testing {

// Random dataset with m trajectories of length n whose next_state chains
// into the following state. Actions are uniform in the bounds.
Dataset random_dataset(std::size_t m, std::size_t n, std::size_t d_s, std::size_t d_a,
                       std::uint64_t seed, const std::string& name = "fixture");

// Fresh empty directory below the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace trajaudit::testing

#endif  // TRAJAUDIT_TESTS_FIXTURES_H_
