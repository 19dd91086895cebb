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

#ifndef DPTOST_DRAW_SEQUENCE_H_
#define DPTOST_DRAW_SEQUENCE_H_

#include <cstdint>
#include <vector>

namespace dptost {

// Counters summed over every matched parameter in a sequence (two per draw).
struct MatchDiagnostics {
  int64_t attempts = 0;     // total (z, u) draws consumed
  int64_t retries = 0;      // attempts beyond the first, per parameter
  int64_t fallbacks = 0;    // parameters that hit max_attempts
  int64_t unconverged = 0;  // optimizer runs that reported non-convergence

  MatchDiagnostics& operator+=(const MatchDiagnostics& o) {
    attempts += o.attempts;
    retries += o.retries;
    fallbacks += o.fallbacks;
    unconverged += o.unconverged;
    return *this;
  }
};

// The H matched differences approximating the sampling distribution of the
// difference estimator. All entries are finite.
struct DrawSequence {
  std::vector<double> draws;
  MatchDiagnostics diagnostics;

  int64_t H() const { return static_cast<int64_t>(draws.size()); }
};

}  // namespace dptost

#endif  // DPTOST_DRAW_SEQUENCE_H_
