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

#include "dptost/privacy.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dptost {
namespace {

constexpr double kSdBoundSlack = 1e-9;

absl::Status CheckSampleSize(int n, int minimum) {
  if (n < minimum) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample size must be >= ", minimum, ", got ", n));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon) {
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be > 0, got ", epsilon));
  }
  return PrivacyBudget(epsilon);
}

absl::StatusOr<ClampBounds> ClampBounds::Create(double lower, double upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "clamp bounds must be finite with lower < upper, got [", lower, ", ",
        upper, "]"));
  }
  return ClampBounds(lower, upper);
}

const NoiseDistribution& DefaultNoise() {
  static const LaplaceNoise* const kLaplace = new LaplaceNoise();
  return *kLaplace;
}

std::vector<double> ClampSample(std::span<const double> values,
                                const ClampBounds& bounds) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double x : values) out.push_back(bounds.Clamp(x));
  return out;
}

absl::StatusOr<double> ProportionSensitivity(int n) {
  if (absl::Status s = CheckSampleSize(n, 1); !s.ok()) return s;
  return 1.0 / n;
}

absl::StatusOr<double> MeanSensitivity(const ClampBounds& bounds, int n) {
  if (absl::Status s = CheckSampleSize(n, 1); !s.ok()) return s;
  return bounds.width() / n;
}

absl::StatusOr<double> SdSensitivity(const ClampBounds& bounds, int n) {
  if (absl::Status s = CheckSampleSize(n, 2); !s.ok()) return s;
  return bounds.width() / std::sqrt(static_cast<double>(n - 1));
}

absl::StatusOr<PrivatizedProportion> ReleasedProportion(
    double p_hat, int n, const PrivacyBudget& budget) {
  if (!std::isfinite(p_hat)) {
    return absl::InvalidArgumentError("released proportion must be finite");
  }
  absl::StatusOr<double> sensitivity = ProportionSensitivity(n);
  if (!sensitivity.ok()) return sensitivity.status();
  return PrivatizedProportion{.p_hat = p_hat,
                              .n = n,
                              .epsilon = budget.epsilon(),
                              .noise_scale = *sensitivity / budget.epsilon()};
}

absl::StatusOr<PrivatizedProportion> PrivatizeProportion(
    double xbar, int n, const PrivacyBudget& budget, Rng& rng,
    const NoiseDistribution& noise) {
  if (!(xbar >= 0.0 && xbar <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample proportion must lie in [0, 1], got ", xbar));
  }
  absl::StatusOr<PrivatizedProportion> release =
      ReleasedProportion(xbar, n, budget);
  if (!release.ok()) return release.status();
  release->p_hat = xbar + noise.Sample(rng, release->noise_scale);
  return release;
}

absl::StatusOr<PrivatizedMoments> ReleasedMoments(double mean_hat,
                                                  double sd_hat, int n,
                                                  const ClampBounds& bounds,
                                                  const PrivacyBudget& budget) {
  if (!std::isfinite(mean_hat) || !std::isfinite(sd_hat)) {
    return absl::InvalidArgumentError("released moments must be finite");
  }
  absl::StatusOr<double> mean_sens = MeanSensitivity(bounds, n);
  if (!mean_sens.ok()) return mean_sens.status();
  absl::StatusOr<double> sd_sens = SdSensitivity(bounds, n);
  if (!sd_sens.ok()) return sd_sens.status();
  const double half_budget = budget.epsilon() / 2.0;
  return PrivatizedMoments{.mean_hat = mean_hat,
                           .sd_hat = sd_hat,
                           .n = n,
                           .bounds = bounds,
                           .epsilon = budget.epsilon(),
                           .tau_mean = *mean_sens / half_budget,
                           .tau_sd = *sd_sens / half_budget};
}

absl::StatusOr<PrivatizedMoments> PrivatizeMoments(
    double mean, double sd, const ClampBounds& bounds, int n,
    const PrivacyBudget& budget, Rng& rng, const NoiseDistribution& noise) {
  if (!(mean >= bounds.lower() && mean <= bounds.upper())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "clamped-sample mean ", mean, " lies outside [", bounds.lower(), ", ",
        bounds.upper(), "]"));
  }
  // Largest n-1 divisor sd attainable by n points in [a, b].
  const double max_sd =
      bounds.width() / 2.0 * std::sqrt(n / std::max(1.0, n - 1.0));
  if (!(sd >= 0.0 && sd <= max_sd + kSdBoundSlack)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "clamped-sample sd must lie in [0, ", max_sd, "], got ", sd));
  }
  absl::StatusOr<PrivatizedMoments> release =
      ReleasedMoments(mean, sd, n, bounds, budget);
  if (!release.ok()) return release.status();
  release->mean_hat = mean + noise.Sample(rng, release->tau_mean);
  release->sd_hat = sd + noise.Sample(rng, release->tau_sd);
  return release;
}

}  // namespace dptost
