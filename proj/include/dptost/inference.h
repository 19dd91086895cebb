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

// Percentile confidence intervals over matched draws and the end-to-end
// private equivalence tests built on them.

#ifndef DPTOST_INFERENCE_H_
#define DPTOST_INFERENCE_H_

#include <span>

#include "absl/status/statusor.h"
#include "dptost/classic_tost.h"
#include "dptost/draw_sequence.h"
#include "dptost/mean_match.h"
#include "dptost/privacy.h"
#include "dptost/prop_match.h"
#include "dptost/rng.h"

namespace dptost {

struct ConfidenceInterval {
  double lower;
  double upper;
};

struct EquivalenceResult {
  double ci_lower;
  double ci_upper;
  double alpha;
  double c0;
  bool equivalent;
  DrawSequence draws;
};

// Nearest-rank quantile: the k-th smallest draw with k = ceil(delta * H),
// i.e. the smallest draw whose empirical CDF reaches delta.
absl::StatusOr<double> EmpiricalQuantile(std::span<const double> draws,
                                         double delta);

// [q(alpha), q(1 - alpha)]. Needs H >= ceil(1/alpha); FailedPrecondition
// otherwise.
absl::StatusOr<ConfidenceInterval> PercentileCi(std::span<const double> draws,
                                                double alpha);

// True iff -c0 < lower and upper < c0.
bool EquivalenceDecision(const ConfidenceInterval& ci, double c0);

// Private TOST for pi_1 - pi_2 from two released proportions.
absl::StatusOr<EquivalenceResult> DpTostProportions(
    double p_hat1, int n, double p_hat2, int m, const PrivacyBudget& budget,
    const EquivalenceSpec& spec, const PropMatchConfig& cfg, const Rng& rng,
    int threads = 1);

// Private TOST for mu_1 - mu_2 from two released clamped moment pairs.
absl::StatusOr<EquivalenceResult> DpTostMeans(
    const PrivatizedMoments& target_x, const PrivatizedMoments& target_y,
    const EquivalenceSpec& spec, const MeanMatchConfig& cfg, const Rng& rng,
    int threads = 1);

}  // namespace dptost

#endif  // DPTOST_INFERENCE_H_
