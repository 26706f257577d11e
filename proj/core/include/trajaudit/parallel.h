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

#ifndef TRAJAUDIT_PARALLEL_H_
#define TRAJAUDIT_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace trajaudit {

// Worker count used by parallel_for: hardware concurrency, overridable with
// set_worker_count (0 restores the default).
std::size_t worker_count();
void set_worker_count(std::size_t workers);

// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index
// runs exactly once; callers write results into per-index slots so output is
// independent of scheduling. The first exception thrown by any body is
// rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace trajaudit

#endif  // TRAJAUDIT_PARALLEL_H_
