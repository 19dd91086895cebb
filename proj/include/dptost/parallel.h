//
// Copyright 2026 The DP-TOST Authors
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

#ifndef DPTOST_PARALLEL_H_
#define DPTOST_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace dptost {

// Calls fn(i) for every i in [0, count) on up to `threads` workers. Work is
// handed out dynamically; callers write results by index so the outcome does
// not depend on the schedule. fn must not throw.
void ParallelFor(size_t count, int threads,
                 const std::function<void(size_t)>& fn);

// Worker count from DP_TOST_THREADS, else the hardware concurrency (>= 1).
int ThreadsFromEnv();

}  // namespace dptost

#endif  // DPTOST_PARALLEL_H_
