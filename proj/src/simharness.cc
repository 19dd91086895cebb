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


#include "dptost/simharness.h"

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dptost/classic_tost.h"
#include "dptost/inference.h"
#include "dptost/mean_match.h"
#include "dptost/parallel.h"
#include "dptost/prop_match.h"

namespace dptost {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A degenerate sample (zero standard error) cannot demonstrate equivalence.
absl::StatusOr<bool> NonPrivateDecision(
    const absl::StatusOr<TostResult>& result) {
  if (result.ok()) return result->equivalent;
  if (absl::IsFailedPrecondition(result.status())) return false;
  return result.status();
}

absl::StatusOr<std::vector<PrivacyBudget>> Budgets(
    const std::vector<double>& epsilons) {
  std::vector<PrivacyBudget> out;
  for (double e : epsilons) {
    absl::StatusOr<PrivacyBudget> b = PrivacyBudget::Create(e);
    if (!b.ok()) return b.status();
    out.push_back(*b);
  }
  return out;
}

// Decision of the non-private test followed by one DP-TOST decision per
// epsilon.
using Decisions = std::vector<uint8_t>;

absl::StatusOr<Decisions> ProportionReplicate(
    const ScenarioGrid& grid, const ParamPair& p, const EquivalenceSpec& spec,
    const std::vector<PrivacyBudget>& budgets, const Rng& rep) {
  Rng data_rng = rep.Substream(0);
  absl::StatusOr<ProportionData> data =
      GenerateProportionData(p.group1, p.group2, grid.n, grid.m, data_rng);
  if (!data.ok()) return data.status();
  absl::StatusOr<bool> tost = NonPrivateDecision(
      TostProportions(data->xbar, grid.n, data->ybar, grid.m, spec));
  if (!tost.ok()) return tost.status();

  Decisions out = {*tost};
  const PropMatchConfig cfg{.H = grid.H};
  for (size_t e = 0; e < budgets.size(); ++e) {
    Rng priv_rng = rep.Substream(1 + 2 * e);
    absl::StatusOr<PrivatizedProportion> px =
        PrivatizeProportion(data->xbar, grid.n, budgets[e], priv_rng);
    if (!px.ok()) return px.status();
    absl::StatusOr<PrivatizedProportion> py =
        PrivatizeProportion(data->ybar, grid.m, budgets[e], priv_rng);
    if (!py.ok()) return py.status();
    absl::StatusOr<EquivalenceResult> dp =
        DpTostProportions(px->p_hat, grid.n, py->p_hat, grid.m, budgets[e],
                          spec, cfg, rep.Substream(2 + 2 * e));
    if (!dp.ok()) return dp.status();
    out.push_back(dp->equivalent);
  }
  return out;
}

absl::StatusOr<Decisions> MeanReplicate(
    const ScenarioGrid& grid, const ParamPair& p, const EquivalenceSpec& spec,
    const std::vector<PrivacyBudget>& budgets, const Rng& rep) {
  absl::StatusOr<ClampBounds> bounds1 = grid.clamping->ForGroup(0, p);
  if (!bounds1.ok()) return bounds1.status();
  absl::StatusOr<ClampBounds> bounds2 = grid.clamping->ForGroup(1, p);
  if (!bounds2.ok()) return bounds2.status();

  Rng data_rng = rep.Substream(0);
  absl::StatusOr<MeanData> data =
      GenerateMeanData(p, grid.n, grid.m, *bounds1, *bounds2, data_rng);
  if (!data.ok()) return data.status();
  absl::StatusOr<bool> tost = NonPrivateDecision(TostMeans(
      data->x.mean, data->x.sd, grid.n, data->y.mean, data->y.sd, grid.m,
      spec));
  if (!tost.ok()) return tost.status();

  Decisions out = {*tost};
  const MeanMatchConfig cfg{.H = grid.H};
  for (size_t e = 0; e < budgets.size(); ++e) {
    Rng priv_rng = rep.Substream(1 + 2 * e);
    absl::StatusOr<PrivatizedMoments> tx =
        PrivatizeMoments(data->x.clamped_mean, data->x.clamped_sd, *bounds1,
                         grid.n, budgets[e], priv_rng);
    if (!tx.ok()) return tx.status();
    absl::StatusOr<PrivatizedMoments> ty =
        PrivatizeMoments(data->y.clamped_mean, data->y.clamped_sd, *bounds2,
                         grid.m, budgets[e], priv_rng);
    if (!ty.ok()) return ty.status();
    absl::StatusOr<EquivalenceResult> dp =
        DpTostMeans(*tx, *ty, spec, cfg, rep.Substream(2 + 2 * e));
    if (!dp.ok()) return dp.status();
    out.push_back(dp->equivalent);
  }
  return out;
}

// Rejection counts indexed [entry][method], method 0 = non-private.
absl::StatusOr<std::vector<std::vector<int64_t>>> CountRejections(
    const ScenarioGrid& grid, int threads) {
  if (absl::Status s = grid.Validate(); !s.ok()) return s;
  absl::StatusOr<EquivalenceSpec> spec =
      EquivalenceSpec::Create(grid.c0, grid.alpha);
  if (!spec.ok()) return spec.status();
  absl::StatusOr<std::vector<PrivacyBudget>> budgets =
      Budgets(grid.epsilon_list);
  if (!budgets.ok()) return budgets.status();

  const size_t entries = grid.param_grid.size();
  const size_t reps = static_cast<size_t>(grid.B);
  const Rng root = Rng::Make(grid.seed);
  std::vector<Decisions> decisions(entries * reps);
  std::vector<absl::Status> errors(entries * reps);
  ParallelFor(entries * reps, threads, [&](size_t idx) {
    const size_t k = idx / reps;
    const size_t b = idx % reps;
    const Rng rep = root.Substream(b).Substream(k);
    absl::StatusOr<Decisions> d =
        grid.endpoint == Endpoint::kProportion
            ? ProportionReplicate(grid, grid.param_grid[k], *spec, *budgets,
                                  rep)
            : MeanReplicate(grid, grid.param_grid[k], *spec, *budgets, rep);
    if (d.ok()) {
      decisions[idx] = *std::move(d);
    } else {
      errors[idx] = d.status();
    }
  });
  for (const absl::Status& s : errors) {
    if (!s.ok()) return s;
  }

  std::vector<std::vector<int64_t>> counts(
      entries, std::vector<int64_t>(1 + budgets->size(), 0));
  for (size_t idx = 0; idx < decisions.size(); ++idx) {
    for (size_t j = 0; j < decisions[idx].size(); ++j) {
      counts[idx / reps][j] += decisions[idx][j];
    }
  }
  return counts;
}

RejectionRow MakeRow(const ScenarioGrid& grid, const ParamPair& p,
                     size_t method, int64_t rejections) {
  return RejectionRow{
      .endpoint = grid.endpoint,
      .n = grid.n,
      .m = grid.m,
      .epsilon = method == 0 ? kInf : grid.epsilon_list[method - 1],
      .reference = p.group1,
      .effect = p.effect(),
      .method = method == 0 ? kMethodTost : kMethodDpTost,
      .rejections = rejections,
      .replicates = grid.B};
}

double SampleSd(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

absl::StatusOr<double> SampleProportion(double pi, int n, Rng& rng) {
  if (!(pi >= 0.0 && pi <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("proportion must lie in [0, 1], got ", pi));
  }
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  int successes = 0;
  for (int i = 0; i < n; ++i) successes += rng.Bernoulli(pi);
  return static_cast<double>(successes) / n;
}

absl::StatusOr<GroupMoments> SampleGroupMoments(double mu, double sigma, int n,
                                                const ClampBounds& bounds,
                                                Rng& rng) {
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("need finite mu and sigma > 0, got (", mu, ", ", sigma,
                     ")"));
  }
  if (n < 2) return absl::InvalidArgumentError("n must be >= 2");
  std::vector<double> x(static_cast<size_t>(n));
  for (double& xi : x) xi = mu + sigma * rng.StdNormal();
  const std::vector<double> clamped = ClampSample(x, bounds);
  const double mean = Mean(x);
  const double clamped_mean = Mean(clamped);
  return GroupMoments{mean, SampleSd(x, mean), clamped_mean,
                      SampleSd(clamped, clamped_mean)};
}

absl::StatusOr<ProportionData> GenerateProportionData(double pi1, double pi2,
                                                      int n, int m, Rng& rng) {
  absl::StatusOr<double> x = SampleProportion(pi1, n, rng);
  if (!x.ok()) return x.status();
  absl::StatusOr<double> y = SampleProportion(pi2, m, rng);
  if (!y.ok()) return y.status();
  return ProportionData{*x, *y};
}

absl::StatusOr<MeanData> GenerateMeanData(const ParamPair& params, int n,
                                          int m, const ClampBounds& bounds1,
                                          const ClampBounds& bounds2,
                                          Rng& rng) {
  absl::StatusOr<GroupMoments> x =
      SampleGroupMoments(params.group1, params.sigma1, n, bounds1, rng);
  if (!x.ok()) return x.status();
  absl::StatusOr<GroupMoments> y =
      SampleGroupMoments(params.group2, params.sigma2, m, bounds2, rng);
  if (!y.ok()) return y.status();
  return MeanData{*x, *y};
}

absl::StatusOr<std::vector<RejectionRow>> RunPowerCurve(
    const ScenarioGrid& grid, int threads) {
  absl::StatusOr<std::vector<std::vector<int64_t>>> counts =
      CountRejections(grid, threads);
  if (!counts.ok()) return counts.status();
  std::vector<RejectionRow> rows;
  for (size_t k = 0; k < grid.param_grid.size(); ++k) {
    for (size_t method = 0; method < (*counts)[k].size(); ++method) {
      rows.push_back(
          MakeRow(grid, grid.param_grid[k], method, (*counts)[k][method]));
    }
  }
  return rows;
}

absl::StatusOr<std::vector<RejectionRow>> RunSizeExperiment(
    const ScenarioGrid& grid, int threads) {
  absl::StatusOr<std::vector<std::vector<int64_t>>> counts =
      CountRejections(grid, threads);
  if (!counts.ok()) return counts.status();

  std::vector<size_t> leaders;  // first entry of each group-1 value
  std::vector<size_t> group_of(grid.param_grid.size());
  for (size_t k = 0; k < grid.param_grid.size(); ++k) {
    size_t g = 0;
    while (g < leaders.size() &&
           grid.param_grid[leaders[g]].group1 != grid.param_grid[k].group1) {
      ++g;
    }
    if (g == leaders.size()) leaders.push_back(k);
    group_of[k] = g;
  }

  std::vector<RejectionRow> rows;
  const size_t methods = 1 + grid.epsilon_list.size();
  for (size_t g = 0; g < leaders.size(); ++g) {
    for (size_t method = 0; method < methods; ++method) {
      size_t best = leaders[g];
      for (size_t k = 0; k < grid.param_grid.size(); ++k) {
        if (group_of[k] == g &&
            (*counts)[k][method] > (*counts)[best][method]) {
          best = k;
        }
      }
      rows.push_back(MakeRow(grid, grid.param_grid[best], method,
                             (*counts)[best][method]));
    }
  }
  return rows;
}

absl::StatusOr<std::vector<RejectionRow>> RunScenario(const ScenarioGrid& grid,
                                                      int threads) {
  return grid.experiment == Experiment::kSize ? RunSizeExperiment(grid, threads)
                                              : RunPowerCurve(grid, threads);
}

CsvTable RejectionTable(const std::vector<RejectionRow>& rows) {
  CsvTable table;
  table.header = {"endpoint", "n",      "m",          "epsilon",
                  "reference", "effect", "method",    "rejections",
                  "replicates", "rejection_rate"};
  for (const RejectionRow& r : rows) {
    table.rows.push_back({std::string(EndpointName(r.endpoint)),
                          absl::StrCat(r.n), absl::StrCat(r.m),
                          FormatDouble(r.epsilon), FormatDouble(r.reference),
                          FormatDouble(r.effect), r.method,
                          absl::StrCat(r.rejections),
                          absl::StrCat(r.replicates), FormatDouble(r.rate())});
  }
  return table;
}

double EmulationMargin(TrialOutcome outcome) {
  return outcome == TrialOutcome::kOffTreat ? 0.1 : std::log(1.1);
}

ClampBounds EmulationCd4Bounds() {
  return *ClampBounds::Create(std::log(100.0), std::log(1500.0));
}

absl::StatusOr<std::vector<AgreementRow>> RunEmulationActg(
    const EmulationConfig& cfg, int threads,
    const std::vector<TrialArm>& arms) {
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  if (arms.size() < 2) {
    return absl::InvalidArgumentError("the emulation needs at least two arms");
  }
  const double c0 = EmulationMargin(cfg.outcome);
  absl::StatusOr<EquivalenceSpec> spec = EquivalenceSpec::Create(c0, cfg.alpha);
  if (!spec.ok()) return spec.status();
  absl::StatusOr<std::vector<PrivacyBudget>> budgets =
      Budgets(cfg.epsilon_list);
  if (!budgets.ok()) return budgets.status();
  const bool proportions = cfg.outcome == TrialOutcome::kOffTreat;
  const ClampBounds bounds = EmulationCd4Bounds();

  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t i = 0; i < arms.size(); ++i) {
    for (size_t j = i + 1; j < arms.size(); ++j) pairs.emplace_back(i, j);
  }
  const size_t n_eps = budgets->size();
  const size_t h_count = static_cast<size_t>(cfg.H);
  const PropMatchConfig prop_cfg{.H = cfg.H};
  const MeanMatchConfig mean_cfg{.H = cfg.H};

  // Per replicate: for each (epsilon, pair), bit 0 = non-private rejects,
  // bit 1 = DP-TOST rejects.
  const Rng root = Rng::Make(cfg.seed);
  std::vector<std::vector<uint8_t>> outcomes(static_cast<size_t>(cfg.B));
  std::vector<absl::Status> errors(static_cast<size_t>(cfg.B));
  ParallelFor(outcomes.size(), threads, [&](size_t b) {
    auto run = [&]() -> absl::StatusOr<std::vector<uint8_t>> {
      const Rng rep = root.Substream(b);
      Rng data_rng = rep.Substream(0);
      std::vector<double> xbar(arms.size());
      std::vector<GroupMoments> moments(arms.size());
      for (size_t a = 0; a < arms.size(); ++a) {
        if (proportions) {
          absl::StatusOr<double> x =
              SampleProportion(arms[a].off_treat, arms[a].n, data_rng);
          if (!x.ok()) return x.status();
          xbar[a] = *x;
        } else {
          absl::StatusOr<GroupMoments> g =
              SampleGroupMoments(arms[a].mean_log_cd4, arms[a].sd_log_cd4,
                                 arms[a].n, bounds, data_rng);
          if (!g.ok()) return g.status();
          moments[a] = *g;
        }
      }
      std::vector<uint8_t> nonprivate(pairs.size());
      for (size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        absl::StatusOr<bool> d = NonPrivateDecision(
            proportions
                ? TostProportions(xbar[i], arms[i].n, xbar[j], arms[j].n, *spec)
                : TostMeans(moments[i].mean, moments[i].sd, arms[i].n,
                            moments[j].mean, moments[j].sd, arms[j].n, *spec));
        if (!d.ok()) return d.status();
        nonprivate[k] = *d;
      }

      std::vector<uint8_t> out;
      std::vector<std::vector<double>> draws(arms.size(),
                                             std::vector<double>(h_count));
      std::vector<double> diff(h_count);
      for (size_t e = 0; e < n_eps; ++e) {
        Rng priv_rng = rep.Substream(1 + 2 * e);
        const Rng match_rng = rep.Substream(2 + 2 * e);
        for (size_t a = 0; a < arms.size(); ++a) {
          const Rng arm_rng = match_rng.Substream(a);
          if (proportions) {
            absl::StatusOr<PrivatizedProportion> p = PrivatizeProportion(
                xbar[a], arms[a].n, (*budgets)[e], priv_rng);
            if (!p.ok()) return p.status();
            for (size_t h = 0; h < h_count; ++h) {
              Rng r = arm_rng.Substream(h);
              draws[a][h] = DrawMatchedProportion(p->p_hat, p->n,
                                                  p->noise_scale, r, prop_cfg)
                                .pi_check;
            }
          } else {
            absl::StatusOr<PrivatizedMoments> t = PrivatizeMoments(
                moments[a].clamped_mean, moments[a].clamped_sd, bounds,
                arms[a].n, (*budgets)[e], priv_rng);
            if (!t.ok()) return t.status();
            for (size_t h = 0; h < h_count; ++h) {
              Rng r = arm_rng.Substream(h);
              draws[a][h] = SolveMomentMatch(*t, r, mean_cfg).mu_check;
            }
          }
        }
        for (size_t k = 0; k < pairs.size(); ++k) {
          const auto [i, j] = pairs[k];
          for (size_t h = 0; h < h_count; ++h) {
            diff[h] = draws[i][h] - draws[j][h];
          }
          absl::StatusOr<ConfidenceInterval> ci = PercentileCi(diff, cfg.alpha);
          if (!ci.ok()) return ci.status();
          const bool dp = EquivalenceDecision(*ci, c0);
          out.push_back(static_cast<uint8_t>(nonprivate[k] | (dp << 1)));
        }
      }
      return out;
    };
    absl::StatusOr<std::vector<uint8_t>> r = run();
    if (r.ok()) {
      outcomes[b] = *std::move(r);
    } else {
      errors[b] = r.status();
    }
  });
  for (const absl::Status& s : errors) {
    if (!s.ok()) return s;
  }

  std::vector<AgreementRow> rows;
  const double scale = 100.0 / cfg.B;
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    const double effect =
        proportions ? arms[i].off_treat - arms[j].off_treat
                    : arms[i].mean_log_cd4 - arms[j].mean_log_cd4;
    for (size_t e = 0; e < n_eps; ++e) {
      int64_t counts[4] = {0, 0, 0, 0};
      for (const auto& o : outcomes) ++counts[o[e * pairs.size() + k]];
      rows.push_back(AgreementRow{
          .comparison_label = absl::StrCat(arms[i].name, " vs ", arms[j].name),
          .outcome = cfg.outcome,
          .true_effect = effect,
          .within_margin = std::abs(effect) < c0,
          .epsilon = cfg.epsilon_list[e],
          .replicates = cfg.B,
          .nonprivate_reject_pct = scale * (counts[1] + counts[3]),
          .dp_reject_pct = scale * (counts[2] + counts[3]),
          .both_equiv_pct = scale * counts[3],
          .both_nonequiv_pct = scale * counts[0],
          .discord_dp_rejects_pct = scale * counts[2],
          .discord_dp_cannot_pct = scale * counts[1]});
    }
  }
  return rows;
}

CsvTable AgreementTable(const std::vector<AgreementRow>& rows) {
  CsvTable table;
  table.header = {"comparison",     "outcome",           "epsilon",
                  "both_equiv_pct", "both_nonequiv_pct", "np_only_pct",
                  "dp_only_pct"};
  for (const AgreementRow& r : rows) {
    table.rows.push_back({r.comparison_label,
                          std::string(TrialOutcomeName(r.outcome)),
                          FormatDouble(r.epsilon),
                          FormatDouble(r.both_equiv_pct),
                          FormatDouble(r.both_nonequiv_pct),
                          FormatDouble(r.discord_dp_cannot_pct),
                          FormatDouble(r.discord_dp_rejects_pct)});
  }
  return table;
}

}  // namespace dptost
