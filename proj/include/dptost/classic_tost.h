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

// Non-private two one-sided tests (TOST) for a difference of two proportions
// (normal reference) and two means (Welch t reference), decided by interval
// inclusion: equivalence is declared when the 1 - 2*alpha confidence interval
// lies strictly inside (-c0, c0).

#ifndef DPTOST_CLASSIC_TOST_H_
#define DPTOST_CLASSIC_TOST_H_

#include <limits>

#include "absl/status/statusor.h"

namespace dptost {

inline constexpr double kNormalReferenceDf =
    std::numeric_limits<double>::infinity();

// Symmetric equivalence margin (-c0, c0) and per-side level alpha.
class EquivalenceSpec {
 public:
  // Requires c0 > 0 and 0 < alpha <= 1/2.
  static absl::StatusOr<EquivalenceSpec> Create(double c0, double alpha);

  double c0() const { return c0_; }
  double alpha() const { return alpha_; }

 private:
  EquivalenceSpec(double c0, double alpha) : c0_(c0), alpha_(alpha) {}
  double c0_;
  double alpha_;
};

struct TostResult {
  double theta_hat;
  double se_hat;
  double t_lower;  // (theta_hat + c0) / se_hat
  double t_upper;  // (theta_hat - c0) / se_hat
  double df;       // kNormalReferenceDf for the normal reference
  double ci_lower;
  double ci_upper;
  bool equivalent;
};

double NormalCdf(double x);
double StudentTCdf(double t, double df);

// p-quantile of Student's t with `df` degrees of freedom; df = +inf gives the
// standard normal quantile. Solved by bisection on the CDF to 1e-10 or better.
absl::StatusOr<double> StudentTQuantile(double p, double df);

// Welch-Satterthwaite degrees of freedom for the unpooled variance estimate.
absl::StatusOr<double> WelchDf(double sd1, int n, double sd2, int m);

// Unpooled-variance TOST for pi_1 - pi_2 with a standard normal reference.
absl::StatusOr<TostResult> TostProportions(double xbar, int n, double ybar,
                                           int m, const EquivalenceSpec& spec);

// Unpooled-variance TOST for mu_1 - mu_2 with a Welch t reference.
absl::StatusOr<TostResult> TostMeans(double mean1, double sd1, int n,
                                     double mean2, double sd2, int m,
                                     const EquivalenceSpec& spec);

}  // namespace dptost

#endif  // DPTOST_CLASSIC_TOST_H_
