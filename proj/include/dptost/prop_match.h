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

// Moment matching for a privatized proportion.
//
// Under the CLT representation, a simulated release at parameter pi is
//   p*(pi) = pi + sqrt(pi (1 - pi) / n) z + u,
// with z ~ N(0, 1) and u drawn from the release's Laplace noise. For one
// (z, u) pair, matching p* to the observed release p_hat,
//   minimize over pi in [0, 1]:  |p_hat - pi - sqrt(pi (1 - pi) / n) z - u|,
// reduces to a quadratic in pi after squaring. Its two roots are computed in
// closed form; one of them can be an artifact of the squaring and is rejected
// by evaluating the unsquared residual.

#ifndef DPTOST_PROP_MATCH_H_
#define DPTOST_PROP_MATCH_H_

#include <optional>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dptost/draw_sequence.h"
#include "dptost/privacy.h"
#include "dptost/rng.h"

namespace dptost {

struct PropMatchConfig {
  int H = 1000;
  int max_attempts = 100;

  absl::Status Validate() const;
};

enum class RootSide { kLeft, kRight, kFallback };

struct PropMatchDraw {
  double pi_check;  // in [0, 1]
  int attempts_used;
  RootSide root_side;
};

struct Discriminant {
  double delta;   // z / sqrt(n)
  double gamma;   // delta^2
  double lambda;  // discriminant of the squared matching equation (over gamma)
};

struct CandidateRoots {
  double left;
  double right;
};

struct SelectedRoot {
  double value;
  RootSide side;
};

// A selected root whose residual exceeds this is a squaring artifact.
inline constexpr double kRootResidualTolerance = 1e-9;

Discriminant ComputeDiscriminant(double p_hat, double z, double u, int n);

// Returns OutOfRange when lambda < 0 (no real root; the caller redraws).
absl::StatusOr<CandidateRoots> ComputeCandidateRoots(double p_hat,
                                                     double delta,
                                                     double gamma,
                                                     double lambda, double u);

// |p_hat - pi - sqrt(pi (1 - pi) / n) z - u|.
double MatchingResidual(double p_hat, double pi, double z, double u, int n);

// Among the roots inside [0, 1], the one with the smaller residual; ties go
// to the left root. Empty when neither root lies in [0, 1].
std::optional<SelectedRoot> SelectRoot(double p_hat, double z, double u, int n,
                                       const CandidateRoots& roots);

// One matched parameter: redraws (z, u) until a root in [0, 1] with residual
// <= kRootResidualTolerance exists. After max_attempts, falls back to the
// best of {0, 1, clamp(p_hat - u, 0, 1)} under the last (z, u).
// `noise_scale` is 1/(n eps) of the release being matched.
PropMatchDraw DrawMatchedProportion(double p_hat, int n, double noise_scale,
                                    Rng& rng, const PropMatchConfig& cfg);

// Convenience overload computing the noise scale from the budget.
absl::StatusOr<PropMatchDraw> DrawMatchedProportion(
    double p_hat, int n, const PrivacyBudget& budget, Rng& rng,
    const PropMatchConfig& cfg);

// H draws of pi_check_1 - pi_check_2. Draw h matches group 1 on substream h
// and group 2 on substream H + h of `rng`, so the output is identical for any
// thread count.
absl::StatusOr<DrawSequence> MatchedDifferenceDraws(
    double p_hat1, int n, double p_hat2, int m, const PrivacyBudget& budget,
    const Rng& rng, const PropMatchConfig& cfg, int threads = 1);

}  // namespace dptost

#endif  // DPTOST_PROP_MATCH_H_
