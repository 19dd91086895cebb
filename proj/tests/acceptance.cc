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


// Acceptance runs. Prints one "criterion N: PASS|FAIL" line per criterion
// with the measured quantities; exits non-zero when any selected criterion
// fails.
//
//   acceptance                  all criteria
//   acceptance --criterion 4    only criterion 4 (repeatable)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dp_audit.h"
#include "dptost/cli.h"
#include "dptost/csv.h"
#include "dptost/mean_match.h"
#include "dptost/parallel.h"
#include "dptost/privacy.h"
#include "dptost/prop_match.h"
#include "dptost/scenario.h"
#include "dptost/simharness.h"
#include "root_oracle.h"

namespace dptost {
namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

Outcome Fail(const absl::Status& s) {
  return {false, absl::StrCat("error: ", s.ToString())};
}

// Closed-form root selection against a brute-force scan of the matching
// equation on random instances.
Outcome RootOracle() {
  Rng rng = Rng::Make(101);
  int with_zero = 0;
  int mismatches = 0;
  int false_roots = 0;
  double worst_gap = 0.0;
  double worst_residual = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 50 + static_cast<int>(rng.Uniform() * 1951);
    const double scale = 1.0 / (n * (0.1 + 1.9 * rng.Uniform()));
    const double p_hat = rng.Uniform() + rng.Laplace(scale);
    const double z = rng.StdNormal();
    const double u = rng.Laplace(scale);

    const Discriminant d = ComputeDiscriminant(p_hat, z, u, n);
    absl::StatusOr<CandidateRoots> roots =
        ComputeCandidateRoots(p_hat, d.delta, d.gamma, d.lambda, u);
    std::optional<SelectedRoot> sel;
    if (roots.ok()) sel = SelectRoot(p_hat, z, u, n, *roots);
    const double residual =
        sel ? MatchingResidual(p_hat, sel->value, z, u, n) : INFINITY;
    const bool exact = residual <= kRootResidualTolerance;

    const std::vector<double> zeros = testing::OracleZeros(p_hat, z, u, n);
    if (zeros.empty()) {
      if (exact) ++false_roots;
      continue;
    }
    ++with_zero;
    if (!exact) {
      ++mismatches;
      continue;
    }
    const double gap = testing::DistanceToNearest(zeros, sel->value);
    worst_gap = std::max(worst_gap, gap);
    worst_residual = std::max(worst_residual, residual);
    if (gap > 1e-6) ++mismatches;
  }
  return {mismatches == 0 && false_roots == 0 && with_zero > 0,
          absl::StrFormat("%d/1000 instances with a root in [0,1], "
                          "%d mismatches, %d spurious, max |root gap| %.2e, "
                          "max residual %.2e",
                          with_zero, mismatches, false_roots, worst_gap,
                          worst_residual)};
}

// Zero-noise, effectively unclamped moment matching against the analytic
// solution (m_hat - sigma z_bar, s_hat / s_z).
Outcome MeanMatchOracle() {
  Rng rng = Rng::Make(202);
  const ClampBounds wide = *ClampBounds::Create(-1e6, 1e6);
  const PrivacyBudget noiseless = *PrivacyBudget::Create(INFINITY);
  double worst_mu = 0.0;
  double worst_sigma = 0.0;
  int retried = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 10 + static_cast<int>(rng.Uniform() * 991);
    const double m_hat = 20.0 * rng.CenteredUniform();
    const double s_hat = 0.05 + 5.0 * rng.Uniform();
    absl::StatusOr<PrivatizedMoments> target =
        ReleasedMoments(m_hat, s_hat, n, wide, noiseless);
    if (!target.ok()) return Fail(target.status());

    Rng solve = rng.Substream(trial);
    Rng replay = solve;
    std::vector<double> z(static_cast<size_t>(n));
    for (double& v : z) v = replay.StdNormal();
    const ClampedMomentSimulator sim(z);
    const double sigma = s_hat / sim.z_sd();
    const double mu = m_hat - sigma * sim.z_mean();

    const MomentMatchDraw d = SolveMomentMatch(*target, solve, {});
    if (d.attempts_used != 1) ++retried;
    worst_mu = std::max(worst_mu, std::abs(d.mu_check - mu));
    worst_sigma = std::max(worst_sigma, std::abs(d.sigma_check - sigma));
  }
  return {worst_mu <= 1e-6 && worst_sigma <= 1e-6 && retried == 0,
          absl::StrFormat("200 instances, max |mu err| %.2e, "
                          "max |sigma err| %.2e, %d retried",
                          worst_mu, worst_sigma, retried)};
}

// Binned frequency ratios of mechanism outputs on adjacent inputs.
Outcome MechanismBound() {
  constexpr int kDraws = 100000;
  bool pass = true;
  std::string detail;
  for (double eps : {0.5, 1.0}) {
    const PrivacyBudget budget = *PrivacyBudget::Create(eps);
    const double bound = std::exp(eps) * 1.05;

    // Proportion release, neighbours differ in one record.
    const int n = 100;
    const double x = 0.37;
    const double x_adj = x + 1.0 / n;
    Rng ra = Rng::Make(301);
    Rng rb = Rng::Make(302);
    const testing::AuditResult prop = testing::BinnedRatioAudit(
        [&] { return PrivatizeProportion(x, n, budget, ra)->p_hat; },
        [&] { return PrivatizeProportion(x_adj, n, budget, rb)->p_hat; },
        testing::LaplaceQuantileEdges(0.5 * (x + x_adj), 1.0 / (n * eps), 8),
        kDraws);

    // Clamped (mean, sd) release on a 3 x 3 grid; neighbours move both
    // statistics by their full sensitivity.
    const ClampBounds b = *ClampBounds::Create(0.0, 1.0);
    const int k = 50;
    const double mean = 0.5;
    const double sd = 0.2;
    const double mean_adj = mean + *MeanSensitivity(b, k);
    const double sd_adj = sd + *SdSensitivity(b, k);
    const PrivatizedMoments shape =
        *ReleasedMoments(mean, sd, k, b, budget);
    const std::vector<double> mean_edges = testing::LaplaceQuantileEdges(
        0.5 * (mean + mean_adj), shape.tau_mean, 3);
    const std::vector<double> sd_edges =
        testing::LaplaceQuantileEdges(0.5 * (sd + sd_adj), shape.tau_sd, 3);
    auto cell = [&](const PrivatizedMoments& r) {
      auto bin = [](const std::vector<double>& e, double v) {
        return static_cast<double>(
            std::upper_bound(e.begin(), e.end(), v) - e.begin());
      };
      return 3.0 * bin(mean_edges, r.mean_hat) + bin(sd_edges, r.sd_hat);
    };
    Rng ma = Rng::Make(303);
    Rng mb = Rng::Make(304);
    const testing::AuditResult moments = testing::BinnedRatioAudit(
        [&] { return cell(*PrivatizeMoments(mean, sd, b, k, budget, ma)); },
        [&] {
          return cell(*PrivatizeMoments(mean_adj, sd_adj, b, k, budget, mb));
        },
        {0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5}, kDraws);

    pass = pass && prop.max_ratio <= bound && moments.max_ratio <= bound;
    absl::StrAppendFormat(&detail,
                          "%seps=%g: bound %.4f, proportion max ratio %.4f, "
                          "moments max ratio %.4f",
                          detail.empty() ? "" : "; ", eps, bound,
                          prop.max_ratio, moments.max_ratio);
  }
  return {pass, detail};
}

absl::StatusOr<std::vector<RejectionRow>> RunGrid(const std::string& json) {
  absl::StatusOr<ScenarioGrid> grid = ParseScenarioGrid(json);
  if (!grid.ok()) return grid.status();
  return RunScenario(*grid, ThreadsFromEnv());
}

std::string RowText(const RejectionRow& r) {
  return absl::StrFormat("%s%s %.4f", r.method,
                         std::isinf(r.epsilon)
                             ? std::string()
                             : absl::StrCat("@eps=", FormatDouble(r.epsilon)),
                         r.rate());
}

Outcome SizeControl() {
  absl::StatusOr<std::vector<RejectionRow>> rows = RunGrid(R"({
    "endpoint": "proportion", "experiment": "size",
    "param_grid": [[0.5, 0.4], [0.5, 0.6]], "n": 800, "m": 800,
    "epsilon_list": [0.5, 1], "c0": 0.1, "alpha": 0.05,
    "H": 500, "B": 2000, "seed": 1})");
  if (!rows.ok()) return Fail(rows.status());
  bool pass = rows->size() == 3;
  std::vector<std::string> parts;
  for (const RejectionRow& r : *rows) {
    const bool ok = r.method == kMethodTost
                        ? r.rate() >= 0.040 && r.rate() <= 0.060
                        : r.rate() >= 0.035 && r.rate() <= 0.065;
    pass = pass && ok;
    parts.push_back(RowText(r));
  }
  return {pass, absl::StrCat("size: ", absl::StrJoin(parts, ", "))};
}

Outcome Conservativeness() {
  absl::StatusOr<std::vector<RejectionRow>> rows = RunGrid(R"({
    "endpoint": "proportion", "experiment": "size",
    "param_grid": [[0.5, 0.4], [0.5, 0.6]], "n": 200, "m": 200,
    "epsilon_list": [0.1], "c0": 0.1, "alpha": 0.05,
    "H": 500, "B": 2000, "seed": 2})");
  if (!rows.ok()) return Fail(rows.status());
  bool pass = rows->size() == 2;
  std::vector<std::string> parts;
  for (const RejectionRow& r : *rows) {
    if (r.method == kMethodDpTost) pass = pass && r.rate() <= 0.065;
    parts.push_back(RowText(r));
  }
  return {pass, absl::StrCat("size: ", absl::StrJoin(parts, ", "))};
}

double McSe(double p, int64_t b) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(b));
}

Outcome PowerConvergence() {
  absl::StatusOr<std::vector<RejectionRow>> rows = RunGrid(R"({
    "endpoint": "proportion", "experiment": "power",
    "param_grid": [[0.5, 0.5]], "n": 800, "m": 800,
    "epsilon_list": [0.1, 1], "c0": 0.1, "alpha": 0.05,
    "H": 500, "B": 2000, "seed": 3})");
  if (!rows.ok()) return Fail(rows.status());
  if (rows->size() != 3) return {false, "unexpected row count"};
  const RejectionRow& np = (*rows)[0];
  const RejectionRow& dp_low = (*rows)[1];
  const RejectionRow& dp_high = (*rows)[2];
  const double gap = std::abs(dp_high.rate() - np.rate());
  const double limit = np.rate() + 3.0 * McSe(dp_low.rate(), dp_low.replicates);
  return {gap <= 0.05 && dp_low.rate() <= limit,
          absl::StrFormat("power: %s, %s, %s; |dp@1 - tost| = %.4f, "
                          "dp@0.1 limit %.4f",
                          RowText(np), RowText(dp_low), RowText(dp_high), gap,
                          limit)};
}

Outcome MeansSizePower() {
  absl::StatusOr<std::vector<RejectionRow>> rows = RunGrid(R"({
    "endpoint": "mean", "experiment": "power",
    "param_grid": [[0, 0, 1, 1], [0, 0.5, 1, 1], [0, -0.5, 1, 1]],
    "n": 200, "m": 200, "epsilon_list": [2], "c0": 0.5, "alpha": 0.05,
    "H": 300, "B": 500, "seed": 4,
    "clamping": {"center_offset": 0, "half_width": 2}})");
  if (!rows.ok()) return Fail(rows.status());
  if (rows->size() != 6) return {false, "unexpected row count"};
  const double np_power = (*rows)[0].rate();
  const double dp_power = (*rows)[1].rate();
  double np_size = 0.0;
  double dp_size = 0.0;
  for (size_t k = 1; k < 3; ++k) {
    np_size = std::max(np_size, (*rows)[2 * k].rate());
    dp_size = std::max(dp_size, (*rows)[2 * k + 1].rate());
  }
  const double gap = std::abs(dp_power - np_power);
  return {gap <= 0.10 && dp_size <= 0.065 && np_size <= 0.065,
          absl::StrFormat("power at effect 0: tost %.4f, dp_tost %.4f "
                          "(gap %.4f, limit 0.10); boundary size: tost %.4f, "
                          "dp_tost %.4f (limit 0.065)",
                          np_power, dp_power, gap, np_size, dp_size)};
}

absl::StatusOr<std::vector<AgreementRow>> Emulate(TrialOutcome outcome,
                                                  std::vector<double> eps,
                                                  uint64_t seed) {
  EmulationConfig cfg;
  cfg.outcome = outcome;
  cfg.epsilon_list = std::move(eps);
  cfg.B = 300;
  cfg.H = 500;
  cfg.seed = seed;
  return RunEmulationActg(cfg, ThreadsFromEnv());
}

const AgreementRow* FindRow(const std::vector<AgreementRow>& rows,
                            const std::string& label, double eps) {
  for (const AgreementRow& r : rows) {
    if (r.comparison_label == label && r.epsilon == eps) return &r;
  }
  return nullptr;
}

Outcome EmulationReproduction() {
  absl::StatusOr<std::vector<AgreementRow>> off =
      Emulate(TrialOutcome::kOffTreat, {0.1, 0.5}, 6);
  if (!off.ok()) return Fail(off.status());
  absl::StatusOr<std::vector<AgreementRow>> cd4 =
      Emulate(TrialOutcome::kLogCd4, {0.5, 1.0}, 5);
  if (!cd4.ok()) return Fail(cd4.status());

  const AgreementRow* o = FindRow(*off, "ZDV vs ZDV+ddI", 0.5);
  const AgreementRow* c1 = FindRow(*cd4, "ZDV+ddC vs ddI", 1.0);
  const AgreementRow* c05 = FindRow(*cd4, "ZDV+ddC vs ddI", 0.5);
  if (o == nullptr || c1 == nullptr || c05 == nullptr) {
    return {false, "missing comparison rows"};
  }
  const bool pass = std::abs(o->nonprivate_reject_pct - 15.7) <= 6.0 &&
                    std::abs(o->dp_reject_pct - 14.2) <= 6.0 &&
                    std::abs(c1->nonprivate_reject_pct - 99.3) <= 3.0 &&
                    std::abs(c1->dp_reject_pct - 39.8) <= 9.0 &&
                    c05->dp_reject_pct <= 5.0;
  return {pass,
          absl::StrFormat(
              "off_treat ZDV vs ZDV+ddI eps=0.5: tost %.1f%% (15.7+-6), "
              "dp_tost %.1f%% (14.2+-6); log_cd4 ZDV+ddC vs ddI eps=1: "
              "tost %.1f%% (99.3+-3), dp_tost %.1f%% (39.8+-9); eps=0.5: "
              "dp_tost %.1f%% (<=5)",
              o->nonprivate_reject_pct, o->dp_reject_pct,
              c1->nonprivate_reject_pct, c1->dp_reject_pct,
              c05->dp_reject_pct)};
}

Outcome DiscordanceAsymmetry() {
  absl::StatusOr<std::vector<AgreementRow>> off =
      Emulate(TrialOutcome::kOffTreat, {0.1, 0.5}, 6);
  if (!off.ok()) return Fail(off.status());
  double worst = 0.0;
  std::string worst_cell;
  for (const AgreementRow& r : *off) {
    if (r.epsilon > 0.5) continue;
    if (r.discord_dp_rejects_pct >= worst) {
      worst = r.discord_dp_rejects_pct;
      worst_cell = absl::StrCat(r.comparison_label, " eps=",
                                FormatDouble(r.epsilon));
    }
  }
  return {worst <= 10.0,
          absl::StrFormat("%d cells, max dp_only %.2f%% (%s), limit 10%%",
                          off->size(), worst, worst_cell)};
}

// Runs the CLI in-process under each worker count and compares output bytes.
Outcome Determinism() {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "dptost_acceptance";
  std::filesystem::create_directories(dir);
  const std::string grid_prop = (dir / "grid_prop.json").string();
  const std::string grid_mean = (dir / "grid_mean.json").string();
  const std::string emu = (dir / "emu.json").string();
  using Config = std::pair<std::string, std::string>;
  for (const auto& [path, json] : std::vector<Config>{
           {grid_prop,
            R"({"endpoint": "proportion", "experiment": "size",
                "param_grid": [[0.5, 0.4], [0.5, 0.6]], "n": 300, "m": 300,
                "epsilon_list": [0.5, 1], "c0": 0.1, "H": 100, "B": 60,
                "seed": 9})"},
           {grid_mean,
            R"({"endpoint": "mean",
                "param_grid": [[0, 0, 1, 1], [0, 0.5, 1, 1]],
                "n": 60, "m": 60, "epsilon_list": [2], "c0": 0.5, "H": 40,
                "B": 8, "seed": 9,
                "clamping": {"center_offset": 0, "half_width": 2}})"},
           {emu,
            R"({"outcome": "log_cd4", "epsilon_list": [1], "B": 6, "H": 40,
                "seed": 9})"}}) {
    if (absl::Status s = WriteTextFile(path, json); !s.ok()) return Fail(s);
  }
  const std::vector<std::vector<std::string>> invocations = {
      {"prop", "--p1", "0.41", "--n", "532", "--p2", "0.33", "--m", "522",
       "--eps", "0.5", "--c0", "0.1", "--seed", "7"},
      {"prop", "--p1", "0.41", "--n", "532", "--p2", "0.33", "--m", "522",
       "--eps", "0.5", "--c0", "0.1", "--seed", "7", "--raw"},
      {"mean", "--mean1", "5.78", "--sd1", "0.34", "--mean2", "5.82", "--sd2",
       "0.35", "--n", "532", "--m", "522", "--lo1", "4.60517", "--hi1",
       "7.31322", "--lo2", "4.60517", "--hi2", "7.31322", "--eps", "1",
       "--c0", "0.0953", "--H", "300", "--seed", "11"},
      {"privatize", "--endpoint", "prop", "--p1", "0.41", "--n", "532",
       "--p2", "0.33", "--m", "522", "--eps", "0.5", "--seed", "7"},
      {"simulate", "--config", grid_prop, "--out", "-"},
      {"simulate", "--config", grid_mean, "--out", "-"},
      {"emulate", "--config", emu, "--out", "-"},
  };
  const char* previous = std::getenv("DP_TOST_THREADS");
  const std::string saved = previous ? previous : "";
  int compared = 0;
  int differing = 0;
  int failed = 0;
  for (const std::vector<std::string>& args : invocations) {
    std::string reference;
    for (const char* threads : {"1", "4", "8"}) {
      setenv("DP_TOST_THREADS", threads, 1);
      std::ostringstream out;
      std::ostringstream err;
      if (RunCli(args, out, err) != kExitOk) ++failed;
      if (threads[0] == '1') {
        reference = out.str();
      } else {
        ++compared;
        if (out.str() != reference) ++differing;
      }
    }
  }
  if (previous != nullptr) {
    setenv("DP_TOST_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("DP_TOST_THREADS");
  }
  std::filesystem::remove_all(dir);
  return {failed == 0 && differing == 0,
          absl::StrFormat("%d invocations x threads {1,4,8}: %d comparisons, "
                          "%d differing, %d failed runs",
                          invocations.size(), compared, differing, failed)};
}

struct Criterion {
  std::function<Outcome()> run;
  double budget_seconds;
};

const std::map<int, Criterion>& Criteria() {
  static const auto* criteria = new std::map<int, Criterion>{
      {1, {RootOracle, 10}},
      {2, {MeanMatchOracle, 30}},
      {3, {MechanismBound, 10}},
      {4, {SizeControl, 600}},
      {5, {Conservativeness, 300}},
      {6, {PowerConvergence, 600}},
      {7, {MeansSizePower, 1800}},
      {8, {EmulationReproduction, 2700}},
      {9, {DiscordanceAsymmetry, 2700}},
      {10, {Determinism, 2700}},
  };
  return *criteria;
}

int Main(int argc, char** argv) {
  CLI::App app{"DP-TOST acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number (repeatable)")
      ->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (const auto& [id, unused] : Criteria()) selected.push_back(id);
  }
  const std::set<int> ids(selected.begin(), selected.end());

  bool all_pass = true;
  for (int id : ids) {
    const Criterion& c = Criteria().at(id);
    const Clock::time_point start = Clock::now();
    const Outcome o = c.run();
    const double secs = Seconds(start);
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    all_pass = all_pass && pass;
    std::printf("criterion %d: %s  %s [%.1f s, budget %.0f s%s]\n", id,
                pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                c.budget_seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}

}  // namespace
}  // namespace dptost

int main(int argc, char** argv) { return dptost::Main(argc, argv); }
