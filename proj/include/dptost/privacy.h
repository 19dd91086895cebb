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

// Clamping, global sensitivities and the additive Laplace mechanism used to
// release per-group summary statistics.
//
// The mechanisms here assume ideal real-valued noise. Floating-point
// side channels in the Laplace sampler are not mitigated.

#ifndef DPTOST_PRIVACY_H_
#define DPTOST_PRIVACY_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dptost/rng.h"

namespace dptost {

// Total per-sample privacy budget. An infinite epsilon is accepted and means
// "no noise"; it is useful as the zero-noise limit in tests.
class PrivacyBudget {
 public:
  static absl::StatusOr<PrivacyBudget> Create(double epsilon);

  double epsilon() const { return epsilon_; }

 private:
  explicit PrivacyBudget(double epsilon) : epsilon_(epsilon) {}
  double epsilon_;
};

// A priori data bounds [lower, upper] with lower < upper.
class ClampBounds {
 public:
  static absl::StatusOr<ClampBounds> Create(double lower, double upper);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double width() const { return upper_ - lower_; }
  double Clamp(double x) const {
    return x < lower_ ? lower_ : (x > upper_ ? upper_ : x);
  }

  friend bool operator==(const ClampBounds&, const ClampBounds&) = default;

 private:
  ClampBounds(double lower, double upper) : lower_(lower), upper_(upper) {}
  double lower_;
  double upper_;
};

// Zero-mean, symmetric additive noise family indexed by a scale parameter.
class NoiseDistribution {
 public:
  virtual ~NoiseDistribution() = default;
  virtual double Sample(Rng& rng, double scale) const = 0;
  virtual double Variance(double scale) const = 0;
};

class LaplaceNoise final : public NoiseDistribution {
 public:
  double Sample(Rng& rng, double scale) const override {
    return rng.Laplace(scale);
  }
  double Variance(double scale) const override { return 2.0 * scale * scale; }
};

// Mechanism used when none is given.
const NoiseDistribution& DefaultNoise();

// A released proportion p_hat = xbar + U with U ~ Laplace(0, 1/(n eps)).
// p_hat may fall outside [0, 1].
struct PrivatizedProportion {
  double p_hat;
  int n;
  double epsilon;
  double noise_scale;
};

// Released clamped moments (m + U_mean, s + U_sd). The budget is split evenly
// between the two releases. sd_hat may be negative.
struct PrivatizedMoments {
  double mean_hat;
  double sd_hat;
  int n;
  ClampBounds bounds;
  double epsilon;
  double tau_mean;
  double tau_sd;
};

// y_i = min(max(x_i, a), b), order and length preserved.
std::vector<double> ClampSample(std::span<const double> values,
                                const ClampBounds& bounds);

// 1/n.
absl::StatusOr<double> ProportionSensitivity(int n);

// (b - a)/n.
absl::StatusOr<double> MeanSensitivity(const ClampBounds& bounds, int n);

// (b - a)/sqrt(n - 1); requires n >= 2.
absl::StatusOr<double> SdSensitivity(const ClampBounds& bounds, int n);

// Curator side: adds Laplace(0, 1/(n eps)) noise to a sample proportion.
absl::StatusOr<PrivatizedProportion> PrivatizeProportion(
    double xbar, int n, const PrivacyBudget& budget, Rng& rng,
    const NoiseDistribution& noise = DefaultNoise());

// Curator side: privatizes the mean and sd of a clamped sample. Each release
// spends eps/2, so tau_mean = (b-a)/(n eps/2) and
// tau_sd = (b-a)/(sqrt(n-1) eps/2). Requires a <= mean <= b and
// sd <= (b-a)/2 * sqrt(n/(n-1)) (with 1e-9 slack).
absl::StatusOr<PrivatizedMoments> PrivatizeMoments(
    double mean, double sd, const ClampBounds& bounds, int n,
    const PrivacyBudget& budget, Rng& rng,
    const NoiseDistribution& noise = DefaultNoise());

// Analyst side: wraps an already released proportion with its noise scale.
absl::StatusOr<PrivatizedProportion> ReleasedProportion(
    double p_hat, int n, const PrivacyBudget& budget);

// Analyst side: wraps released moments with their noise scales.
absl::StatusOr<PrivatizedMoments> ReleasedMoments(double mean_hat,
                                                  double sd_hat, int n,
                                                  const ClampBounds& bounds,
                                                  const PrivacyBudget& budget);

}  // namespace dptost

#endif  // DPTOST_PRIVACY_H_
