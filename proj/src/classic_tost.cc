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

#include "dptost/classic_tost.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dptost {
namespace {

// Beyond this the t and normal quantiles agree far below the solve tolerance.
constexpr double kLargeDf = 1e10;
constexpr double kQuantileTolerance = 1e-12;

double InvertCdf(double p, double df) {
  double lo = -1.0;
  double hi = 1.0;
  while (StudentTCdf(lo, df) > p) lo *= 2.0;
  while (StudentTCdf(hi, df) < p) hi *= 2.0;
  while (hi - lo > kQuantileTolerance * std::max(1.0, std::abs(lo))) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (StudentTCdf(mid, df) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TostResult IntervalInclusion(double theta_hat, double se_hat, double df,
                             double q, double c0) {
  TostResult r;
  r.theta_hat = theta_hat;
  r.se_hat = se_hat;
  r.t_lower = (theta_hat + c0) / se_hat;
  r.t_upper = (theta_hat - c0) / se_hat;
  r.df = df;
  r.ci_lower = theta_hat - q * se_hat;
  r.ci_upper = theta_hat + q * se_hat;
  r.equivalent = -c0 < r.ci_lower && r.ci_upper < c0;
  return r;
}

}  // namespace

absl::StatusOr<EquivalenceSpec> EquivalenceSpec::Create(double c0,
                                                        double alpha) {
  if (!(c0 > 0.0) || !std::isfinite(c0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("margin c0 must be finite and > 0, got ", c0));
  }
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must lie in (0, 1/2], got ", alpha));
  }
  return EquivalenceSpec(c0, alpha);
}

double NormalCdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double StudentTCdf(double t, double df) {
  if (df >= kLargeDf) return NormalCdf(t);
  if (t == 0.0) return 0.5;
  const double x = df / (df + t * t);
  const double tail = 0.5 * boost::math::ibeta(df / 2.0, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

absl::StatusOr<double> StudentTQuantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("quantile level must lie in (0, 1), got ", p));
  }
  if (!(df > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("degrees of freedom must be > 0, got ", df));
  }
  if (p == 0.5) return 0.0;
  // Solve in the upper tail and reflect; keeps the two tails exactly mirrored.
  if (p < 0.5) return -InvertCdf(1.0 - p, df);
  return InvertCdf(p, df);
}

absl::StatusOr<double> WelchDf(double sd1, int n, double sd2, int m) {
  if (n < 2 || m < 2) {
    return absl::InvalidArgumentError("Welch df needs n >= 2 and m >= 2");
  }
  if (!(sd1 >= 0.0) || !(sd2 >= 0.0)) {
    return absl::InvalidArgumentError("standard deviations must be >= 0");
  }
  const double v1 = sd1 * sd1 / n;
  const double v2 = sd2 * sd2 / m;
  if (v1 + v2 == 0.0) {
    return absl::InvalidArgumentError(
        "Welch df undefined when both standard deviations are zero");
  }
  return (v1 + v2) * (v1 + v2) /
         (v1 * v1 / (n - 1) + v2 * v2 / (m - 1));
}

absl::StatusOr<TostResult> TostProportions(double xbar, int n, double ybar,
                                           int m,
                                           const EquivalenceSpec& spec) {
  if (n < 1 || m < 1) {
    return absl::InvalidArgumentError("sample sizes must be >= 1");
  }
  if (!(xbar >= 0.0 && xbar <= 1.0 && ybar >= 0.0 && ybar <= 1.0)) {
    return absl::InvalidArgumentError("sample proportions must lie in [0, 1]");
  }
  const double se =
      std::sqrt(xbar * (1.0 - xbar) / n + ybar * (1.0 - ybar) / m);
  if (!(se > 0.0)) {
    return absl::FailedPreconditionError(
        "degenerate data: both proportions are 0 or 1, standard error is 0");
  }
  absl::StatusOr<double> q =
      StudentTQuantile(1.0 - spec.alpha(), kNormalReferenceDf);
  if (!q.ok()) return q.status();
  return IntervalInclusion(xbar - ybar, se, kNormalReferenceDf, *q, spec.c0());
}

absl::StatusOr<TostResult> TostMeans(double mean1, double sd1, int n,
                                     double mean2, double sd2, int m,
                                     const EquivalenceSpec& spec) {
  absl::StatusOr<double> df = WelchDf(sd1, n, sd2, m);
  if (!df.ok()) {
    if (n >= 2 && m >= 2 && sd1 == 0.0 && sd2 == 0.0) {
      return absl::FailedPreconditionError(
          "degenerate data: both standard deviations are 0");
    }
    return df.status();
  }
  const double se = std::sqrt(sd1 * sd1 / n + sd2 * sd2 / m);
  absl::StatusOr<double> q = StudentTQuantile(1.0 - spec.alpha(), *df);
  if (!q.ok()) return q.status();
  return IntervalInclusion(mean1 - mean2, se, *df, *q, spec.c0());
}

}  // namespace dptost
