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

// Moment matching for privatized clamped means.
//
// For one draw of common random numbers (a standard normal vector z of the
// group's size and noise terms u_mean, u_sd at the release's scales) the
// simulated release at (mu, sigma) is
//   (m*(mu, sigma) + u_mean, s*(mu, sigma) + u_sd),
// where m*, s* are the mean and sd (divisor n - 1) of clamp(mu + sigma z_i).
// The matched (mu, sigma) minimizes the Euclidean distance between the
// released and simulated pairs over [a, b] x [sigma_min, sigma_max]. There is
// no closed form once clamping is active, so the fit uses Nelder-Mead.
//
// Because the Laplace noise is symmetric, adding or subtracting the simulated
// noise induces the same distribution; "+" is used throughout.

#ifndef DPTOST_MEAN_MATCH_H_
#define DPTOST_MEAN_MATCH_H_

#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dptost/draw_sequence.h"
#include "dptost/privacy.h"
#include "dptost/rng.h"

namespace dptost {

struct MeanMatchConfig {
  int H = 1000;
  int max_attempts = 100;
  double opt_tolerance = 1e-8;
  int opt_max_iter = 500;
  int restarts = 3;

  absl::Status Validate() const;
};

struct ClampedMoments {
  double mean;
  double sd;
};

struct SigmaDomain {
  double min;
  double max;
};

struct MomentMatchDraw {
  double mu_check;     // in [a, b]
  double sigma_check;  // in [sigma_min, sigma_max]
  double objective_value;
  bool converged;      // false when the attempt budget was exhausted
  int attempts_used;
  int unconverged_runs;  // optimizer runs that stopped at max_iter
};

// sigma_min = 1e-9 (b - a), sigma_max = b - a.
SigmaDomain SigmaSearchDomain(const ClampBounds& bounds);

// Mean and sd (divisor n - 1) of clamp(mu + sigma z_i, a, b). Direct O(n)
// evaluation; requires sigma > 0 and at least two values.
absl::StatusOr<ClampedMoments> SimulateClampedMoments(
    double mu, double sigma, const ClampBounds& bounds,
    std::span<const double> z);

// Distance between the release and the simulated release at (mu, sigma).
// Requires z.size() == target.n.
absl::StatusOr<double> MatchingObjective(double mu, double sigma,
                                         const PrivatizedMoments& target,
                                         std::span<const double> z,
                                         double u_mean, double u_sd);

// Clamped moments of mu + sigma z for a fixed z in O(log n) per evaluation:
// the clamped values form a prefix and a suffix of the sorted z, and the
// unclamped middle is summarized by prefix sums.
class ClampedMomentSimulator {
 public:
  explicit ClampedMomentSimulator(std::vector<double> z);

  int n() const { return static_cast<int>(sorted_.size()); }
  double z_mean() const { return prefix_.back() / n(); }
  double z_sd() const;

  ClampedMoments Evaluate(double mu, double sigma,
                          const ClampBounds& bounds) const;

 private:
  std::vector<double> sorted_;
  std::vector<double> prefix_;     // prefix_[k] = sum of the k smallest z
  std::vector<double> prefix_sq_;  // same for z^2
};

// Fits (mu, sigma) for one fixed draw (sim, u_mean, u_sd). Restarts after the
// first run are started from the best point found, jittered with `jitter`.
// `converged` reports whether the best run met the optimizer tolerance.
MomentMatchDraw FitMatchedMoments(const PrivatizedMoments& target,
                                  const ClampedMomentSimulator& sim,
                                  double u_mean, double u_sd,
                                  const MeanMatchConfig& cfg, Rng& jitter);

// One matched (mu, sigma). Each attempt draws a fresh z vector of length n and
// fresh (u_mean, u_sd) at the release's scales. An attempt fails when the
// optimizer does not converge or when mu sits on a bound of [a, b] (the
// unconstrained match lies outside the data bounds). After max_attempts the
// best candidate seen is returned with converged = false.
MomentMatchDraw SolveMomentMatch(const PrivatizedMoments& target, Rng& rng,
                                 const MeanMatchConfig& cfg);

// H draws of mu_check_X - mu_check_Y. Draw h solves group X on substream h
// and group Y on substream H + h of `rng`.
absl::StatusOr<DrawSequence> MatchedMeanDifferenceDraws(
    const PrivatizedMoments& target_x, const PrivatizedMoments& target_y,
    const Rng& rng, const MeanMatchConfig& cfg, int threads = 1);

}  // namespace dptost

#endif  // DPTOST_MEAN_MATCH_H_
