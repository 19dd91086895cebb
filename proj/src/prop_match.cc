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

#include "dptost/prop_match.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"
#include "dptost/parallel.h"

namespace dptost {
namespace {

CandidateRoots RootsUnchecked(double p_hat, double delta, double gamma,
                              double lambda, double u) {
  const double center = 2.0 * p_hat + gamma - 2.0 * u;
  const double spread = delta * std::sqrt(lambda);
  const double denom = 2.0 * (gamma + 1.0);
  return {(center - spread) / denom, (center + spread) / denom};
}

bool InUnitInterval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

absl::Status PropMatchConfig::Validate() const {
  if (H < 1) return absl::InvalidArgumentError("H must be >= 1");
  if (max_attempts < 1) {
    return absl::InvalidArgumentError("max_attempts must be >= 1");
  }
  return absl::OkStatus();
}

Discriminant ComputeDiscriminant(double p_hat, double z, double u, int n) {
  const double delta = z / std::sqrt(static_cast<double>(n));
  const double gamma = delta * delta;
  const double lambda = -4.0 * p_hat * p_hat + 4.0 * p_hat + gamma +
                        8.0 * p_hat * u - 4.0 * u * u - 4.0 * u;
  return {delta, gamma, lambda};
}

absl::StatusOr<CandidateRoots> ComputeCandidateRoots(double p_hat,
                                                     double delta,
                                                     double gamma,
                                                     double lambda, double u) {
  if (lambda < 0.0) {
    return absl::OutOfRangeError(
        absl::StrCat("no real root: discriminant ", lambda, " < 0"));
  }
  return RootsUnchecked(p_hat, delta, gamma, lambda, u);
}

double MatchingResidual(double p_hat, double pi, double z, double u, int n) {
  const double variance = std::max(0.0, pi * (1.0 - pi)) / n;
  return std::abs(p_hat - pi - std::sqrt(variance) * z - u);
}

std::optional<SelectedRoot> SelectRoot(double p_hat, double z, double u, int n,
                                       const CandidateRoots& roots) {
  const bool left_ok = InUnitInterval(roots.left);
  const bool right_ok = InUnitInterval(roots.right);
  if (left_ok && right_ok) {
    const double left_loss = MatchingResidual(p_hat, roots.left, z, u, n);
    const double right_loss = MatchingResidual(p_hat, roots.right, z, u, n);
    if (right_loss < left_loss) {
      return SelectedRoot{roots.right, RootSide::kRight};
    }
    return SelectedRoot{roots.left, RootSide::kLeft};
  }
  if (left_ok) return SelectedRoot{roots.left, RootSide::kLeft};
  if (right_ok) return SelectedRoot{roots.right, RootSide::kRight};
  return std::nullopt;
}

PropMatchDraw DrawMatchedProportion(double p_hat, int n, double noise_scale,
                                    Rng& rng, const PropMatchConfig& cfg) {
  double z = 0.0;
  double u = 0.0;
  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    z = rng.StdNormal();
    u = rng.Laplace(noise_scale);
    const Discriminant d = ComputeDiscriminant(p_hat, z, u, n);
    if (d.lambda < 0.0) continue;
    const CandidateRoots roots =
        RootsUnchecked(p_hat, d.delta, d.gamma, d.lambda, u);
    const std::optional<SelectedRoot> root = SelectRoot(p_hat, z, u, n, roots);
    if (!root.has_value()) continue;
    if (MatchingResidual(p_hat, root->value, z, u, n) >
        kRootResidualTolerance) {
      continue;
    }
    return {root->value, attempt, root->side};
  }
  // No exact match in the attempt budget: best feasible point for the last
  // (z, u); listed in tie-break order.
  const std::array<double, 3> candidates = {
      0.0, 1.0, std::clamp(p_hat - u, 0.0, 1.0)};
  double best = candidates[0];
  double best_loss = MatchingResidual(p_hat, best, z, u, n);
  for (double c : candidates) {
    const double loss = MatchingResidual(p_hat, c, z, u, n);
    if (loss < best_loss) {
      best = c;
      best_loss = loss;
    }
  }
  return {best, cfg.max_attempts, RootSide::kFallback};
}

absl::StatusOr<PropMatchDraw> DrawMatchedProportion(
    double p_hat, int n, const PrivacyBudget& budget, Rng& rng,
    const PropMatchConfig& cfg) {
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  absl::StatusOr<PrivatizedProportion> release =
      ReleasedProportion(p_hat, n, budget);
  if (!release.ok()) return release.status();
  return DrawMatchedProportion(p_hat, n, release->noise_scale, rng, cfg);
}

absl::StatusOr<DrawSequence> MatchedDifferenceDraws(
    double p_hat1, int n, double p_hat2, int m, const PrivacyBudget& budget,
    const Rng& rng, const PropMatchConfig& cfg, int threads) {
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  absl::StatusOr<PrivatizedProportion> first =
      ReleasedProportion(p_hat1, n, budget);
  if (!first.ok()) return first.status();
  absl::StatusOr<PrivatizedProportion> second =
      ReleasedProportion(p_hat2, m, budget);
  if (!second.ok()) return second.status();

  const size_t h_count = static_cast<size_t>(cfg.H);
  std::vector<PropMatchDraw> group1(h_count);
  std::vector<PropMatchDraw> group2(h_count);
  ParallelFor(h_count, threads, [&](size_t h) {
    Rng rng1 = rng.Substream(h);
    Rng rng2 = rng.Substream(h_count + h);
    group1[h] = DrawMatchedProportion(p_hat1, n, first->noise_scale, rng1, cfg);
    group2[h] =
        DrawMatchedProportion(p_hat2, m, second->noise_scale, rng2, cfg);
  });

  DrawSequence out;
  out.draws.reserve(h_count);
  for (size_t h = 0; h < h_count; ++h) {
    out.draws.push_back(group1[h].pi_check - group2[h].pi_check);
    for (const PropMatchDraw* d : {&group1[h], &group2[h]}) {
      out.diagnostics.attempts += d->attempts_used;
      out.diagnostics.retries += d->attempts_used - 1;
      if (d->root_side == RootSide::kFallback) ++out.diagnostics.fallbacks;
    }
  }
  return out;
}

}  // namespace dptost
