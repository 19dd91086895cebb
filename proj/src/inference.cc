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

#include "dptost/inference.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"

namespace dptost {
namespace {

// ceil(delta * H) without being tripped by representation error such as
// 0.95 * 1000 = 949.99999999999994.
size_t NearestRank(double delta, size_t h) {
  const double scaled = delta * static_cast<double>(h);
  const double k = std::ceil(scaled - 1e-9 * std::max(1.0, scaled));
  return std::clamp<size_t>(static_cast<size_t>(std::max(k, 1.0)), 1, h);
}

absl::Status CheckDraws(std::span<const double> draws) {
  if (draws.empty()) {
    return absl::InvalidArgumentError("draw sequence is empty");
  }
  for (double d : draws) {
    if (!std::isfinite(d)) {
      return absl::InternalError("draw sequence contains a non-finite value");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<EquivalenceResult> Decide(DrawSequence draws,
                                         const EquivalenceSpec& spec) {
  absl::StatusOr<ConfidenceInterval> ci =
      PercentileCi(draws.draws, spec.alpha());
  if (!ci.ok()) return ci.status();
  return EquivalenceResult{.ci_lower = ci->lower,
                           .ci_upper = ci->upper,
                           .alpha = spec.alpha(),
                           .c0 = spec.c0(),
                           .equivalent = EquivalenceDecision(*ci, spec.c0()),
                           .draws = std::move(draws)};
}

}  // namespace

absl::StatusOr<double> EmpiricalQuantile(std::span<const double> draws,
                                         double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("quantile level must lie in (0, 1), got ", delta));
  }
  if (absl::Status s = CheckDraws(draws); !s.ok()) return s;
  std::vector<double> work(draws.begin(), draws.end());
  const size_t k = NearestRank(delta, work.size());
  std::nth_element(work.begin(), work.begin() + (k - 1), work.end());
  return work[k - 1];
}

absl::StatusOr<ConfidenceInterval> PercentileCi(std::span<const double> draws,
                                                double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must lie in (0, 1/2], got ", alpha));
  }
  const double needed = std::ceil(1.0 / alpha - 1e-9);
  if (static_cast<double>(draws.size()) < needed) {
    return absl::FailedPreconditionError(
        absl::StrCat("insufficient draws: H = ", draws.size(), " but alpha = ",
                     alpha, " needs at least ", needed));
  }
  if (absl::Status s = CheckDraws(draws); !s.ok()) return s;
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  return ConfidenceInterval{
      sorted[NearestRank(alpha, sorted.size()) - 1],
      sorted[NearestRank(1.0 - alpha, sorted.size()) - 1]};
}

bool EquivalenceDecision(const ConfidenceInterval& ci, double c0) {
  return -c0 < ci.lower && ci.upper < c0;
}

absl::StatusOr<EquivalenceResult> DpTostProportions(
    double p_hat1, int n, double p_hat2, int m, const PrivacyBudget& budget,
    const EquivalenceSpec& spec, const PropMatchConfig& cfg, const Rng& rng,
    int threads) {
  absl::StatusOr<DrawSequence> draws =
      MatchedDifferenceDraws(p_hat1, n, p_hat2, m, budget, rng, cfg, threads);
  if (!draws.ok()) return draws.status();
  return Decide(*std::move(draws), spec);
}

absl::StatusOr<EquivalenceResult> DpTostMeans(
    const PrivatizedMoments& target_x, const PrivatizedMoments& target_y,
    const EquivalenceSpec& spec, const MeanMatchConfig& cfg, const Rng& rng,
    int threads) {
  absl::StatusOr<DrawSequence> draws =
      MatchedMeanDifferenceDraws(target_x, target_y, rng, cfg, threads);
  if (!draws.ok()) return draws.status();
  return Decide(*std::move(draws), spec);
}

}  // namespace dptost
