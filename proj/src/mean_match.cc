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

#include "dptost/mean_match.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dptost/nelder_mead.h"
#include "dptost/parallel.h"

namespace dptost {
namespace {

constexpr double kSigmaMinFraction = 1e-9;
// mu within this fraction of (b - a) from a bound counts as pinned.
constexpr double kPinnedFraction = 1e-9;

double Residual(const PrivatizedMoments& target, const ClampedMoments& sim,
                double u_mean, double u_sd) {
  const double d_mean = target.mean_hat - (sim.mean + u_mean);
  const double d_sd = target.sd_hat - (sim.sd + u_sd);
  return std::sqrt(d_mean * d_mean + d_sd * d_sd);
}

bool Pinned(double mu, const ClampBounds& bounds) {
  const double slack = kPinnedFraction * bounds.width();
  return mu <= bounds.lower() + slack || mu >= bounds.upper() - slack;
}

}  // namespace

absl::Status MeanMatchConfig::Validate() const {
  if (H < 1 || max_attempts < 1 || opt_max_iter < 1 || restarts < 1 ||
      !(opt_tolerance > 0.0)) {
    return absl::InvalidArgumentError(
        "mean-match config fields must all be positive");
  }
  return absl::OkStatus();
}

SigmaDomain SigmaSearchDomain(const ClampBounds& bounds) {
  return {kSigmaMinFraction * bounds.width(), bounds.width()};
}

absl::StatusOr<ClampedMoments> SimulateClampedMoments(
    double mu, double sigma, const ClampBounds& bounds,
    std::span<const double> z) {
  if (!(sigma > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma must be > 0, got ", sigma));
  }
  if (z.size() < 2) {
    return absl::InvalidArgumentError("need at least two simulated values");
  }
  const double n = static_cast<double>(z.size());
  double sum = 0.0;
  for (double zi : z) sum += bounds.Clamp(mu + sigma * zi);
  const double mean = sum / n;
  double ss = 0.0;
  for (double zi : z) {
    const double d = bounds.Clamp(mu + sigma * zi) - mean;
    ss += d * d;
  }
  return ClampedMoments{mean, std::sqrt(ss / (n - 1.0))};
}

absl::StatusOr<double> MatchingObjective(double mu, double sigma,
                                         const PrivatizedMoments& target,
                                         std::span<const double> z,
                                         double u_mean, double u_sd) {
  if (z.size() != static_cast<size_t>(target.n)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "z vector has length ", z.size(), ", release has n = ", target.n));
  }
  absl::StatusOr<ClampedMoments> sim =
      SimulateClampedMoments(mu, sigma, target.bounds, z);
  if (!sim.ok()) return sim.status();
  return Residual(target, *sim, u_mean, u_sd);
}

ClampedMomentSimulator::ClampedMomentSimulator(std::vector<double> z)
    : sorted_(std::move(z)) {
  std::sort(sorted_.begin(), sorted_.end());
  prefix_.assign(sorted_.size() + 1, 0.0);
  prefix_sq_.assign(sorted_.size() + 1, 0.0);
  for (size_t i = 0; i < sorted_.size(); ++i) {
    prefix_[i + 1] = prefix_[i] + sorted_[i];
    prefix_sq_[i + 1] = prefix_sq_[i] + sorted_[i] * sorted_[i];
  }
}

double ClampedMomentSimulator::z_sd() const {
  const double mean = z_mean();
  double ss = 0.0;
  for (double z : sorted_) ss += (z - mean) * (z - mean);
  return std::sqrt(ss / (n() - 1));
}

ClampedMoments ClampedMomentSimulator::Evaluate(
    double mu, double sigma, const ClampBounds& bounds) const {
  const double a = bounds.lower();
  const double b = bounds.upper();
  const auto first = sorted_.begin();
  // [0, lo) clamp to a, [hi, n) clamp to b.
  const size_t lo = static_cast<size_t>(
      std::lower_bound(first, sorted_.end(), (a - mu) / sigma) - first);
  const size_t hi = static_cast<size_t>(
      std::upper_bound(first, sorted_.end(), (b - mu) / sigma) - first);
  const size_t mid = hi > lo ? hi - lo : 0;
  const size_t n_lo = lo;
  const size_t n_hi = sorted_.size() - std::max(hi, lo);

  // Work in offsets from a point of [a, b] near mu to limit cancellation.
  const double center = std::clamp(mu, a, b);
  const double da = a - center;
  const double db = b - center;
  const double d0 = mu - center;
  double s1 = n_lo * da + n_hi * db;
  double s2 = n_lo * da * da + n_hi * db * db;
  if (mid > 0) {
    const double zs = prefix_[hi] - prefix_[lo];
    const double zq = prefix_sq_[hi] - prefix_sq_[lo];
    s1 += mid * d0 + sigma * zs;
    s2 += mid * d0 * d0 + 2.0 * d0 * sigma * zs + sigma * sigma * zq;
  }
  const double nn = static_cast<double>(sorted_.size());
  const double var = std::max(0.0, (s2 - s1 * s1 / nn) / (nn - 1.0));
  return {center + s1 / nn, std::sqrt(var)};
}

MomentMatchDraw FitMatchedMoments(const PrivatizedMoments& target,
                                  const ClampedMomentSimulator& sim,
                                  double u_mean, double u_sd,
                                  const MeanMatchConfig& cfg, Rng& jitter) {
  const ClampBounds& bounds = target.bounds;
  const SigmaDomain sigma_domain = SigmaSearchDomain(bounds);
  const Box2 box{{bounds.lower(), sigma_domain.min},
                 {bounds.upper(), sigma_domain.max}};
  auto objective = [&](const Point2& p) {
    return Residual(target, sim.Evaluate(p[0], p[1], bounds), u_mean, u_sd);
  };

  const Point2 init = {
      bounds.Clamp(target.mean_hat),
      std::clamp(std::abs(target.sd_hat), sigma_domain.min, sigma_domain.max)};
  const double floor = 10.0 * sigma_domain.min;
  NelderMeadOptions options;
  options.tolerance = cfg.opt_tolerance;
  options.max_iter = cfg.opt_max_iter;
  options.initial_step = {std::max(0.1 * init[1] + target.tau_mean, floor),
                          std::max(0.1 * init[1] + 0.5 * target.tau_sd, floor)};

  MomentMatchDraw out{};
  NelderMeadResult best = NelderMead(objective, init, box, options);
  if (!best.converged) ++out.unconverged_runs;
  for (int run = 1; run < cfg.restarts; ++run) {
    if (best.converged && best.value <= 10.0 * cfg.opt_tolerance) break;
    const Point2 start = box.Project(
        {best.x[0] + options.initial_step[0] * jitter.CenteredUniform(),
         best.x[1] + options.initial_step[1] * jitter.CenteredUniform()});
    NelderMeadResult next = NelderMead(objective, start, box, options);
    if (!next.converged) ++out.unconverged_runs;
    if (next.value < best.value ||
        (next.value == best.value && next.converged)) {
      best = next;
    }
  }
  out.mu_check = best.x[0];
  out.sigma_check = best.x[1];
  out.objective_value = best.value;
  out.converged = best.converged;
  out.attempts_used = 1;
  return out;
}

MomentMatchDraw SolveMomentMatch(const PrivatizedMoments& target, Rng& rng,
                                 const MeanMatchConfig& cfg) {
  MomentMatchDraw best{};
  bool have_best = false;
  int unconverged_runs = 0;
  std::vector<double> z(static_cast<size_t>(target.n));
  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    for (double& zi : z) zi = rng.StdNormal();
    const ClampedMomentSimulator sim(z);
    const double u_mean = rng.Laplace(target.tau_mean);
    const double u_sd = rng.Laplace(target.tau_sd);
    MomentMatchDraw fit =
        FitMatchedMoments(target, sim, u_mean, u_sd, cfg, rng);
    unconverged_runs += fit.unconverged_runs;
    if (fit.converged && !Pinned(fit.mu_check, target.bounds)) {
      fit.attempts_used = attempt;
      fit.unconverged_runs = unconverged_runs;
      return fit;
    }
    if (!have_best || fit.objective_value < best.objective_value) {
      best = fit;
      have_best = true;
    }
  }
  best.converged = false;
  best.attempts_used = cfg.max_attempts;
  best.unconverged_runs = unconverged_runs;
  return best;
}

absl::StatusOr<DrawSequence> MatchedMeanDifferenceDraws(
    const PrivatizedMoments& target_x, const PrivatizedMoments& target_y,
    const Rng& rng, const MeanMatchConfig& cfg, int threads) {
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  if (target_x.n < 2 || target_y.n < 2) {
    return absl::InvalidArgumentError("both groups need n >= 2");
  }
  const size_t h_count = static_cast<size_t>(cfg.H);
  std::vector<MomentMatchDraw> group_x(h_count);
  std::vector<MomentMatchDraw> group_y(h_count);
  ParallelFor(h_count, threads, [&](size_t h) {
    Rng rng_x = rng.Substream(h);
    Rng rng_y = rng.Substream(h_count + h);
    group_x[h] = SolveMomentMatch(target_x, rng_x, cfg);
    group_y[h] = SolveMomentMatch(target_y, rng_y, cfg);
  });

  DrawSequence out;
  out.draws.reserve(h_count);
  for (size_t h = 0; h < h_count; ++h) {
    out.draws.push_back(group_x[h].mu_check - group_y[h].mu_check);
    for (const MomentMatchDraw* d : {&group_x[h], &group_y[h]}) {
      out.diagnostics.attempts += d->attempts_used;
      out.diagnostics.retries += d->attempts_used - 1;
      out.diagnostics.unconverged += d->unconverged_runs;
      if (!d->converged) ++out.diagnostics.fallbacks;
    }
  }
  return out;
}

}  // namespace dptost
