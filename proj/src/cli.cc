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


#include "dptost/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string_view>

#include "CLI11.hpp"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dptost/classic_tost.h"
#include "dptost/csv.h"
#include "dptost/inference.h"
#include "dptost/parallel.h"
#include "dptost/privacy.h"
#include "dptost/rng.h"
#include "dptost/scenario.h"
#include "dptost/simharness.h"

namespace dptost {
namespace {

// Released proportions further than this many noise scales outside [0, 1]
// are treated as input errors.
constexpr double kMaxReleasedScales = 20.0;

struct CommonFlags {
  double eps = 0.0;
  double c0 = 0.0;
  double alpha = 0.05;
  int H = 1000;
  uint64_t seed = 0;
  bool raw = false;
  std::string format = "text";
};

struct PropFlags {
  double p1 = 0.0;
  double p2 = 0.0;
  int n = 0;
  int m = 0;
};

struct MeanFlags {
  double mean1 = 0.0;
  double sd1 = 0.0;
  double mean2 = 0.0;
  double sd2 = 0.0;
  int n = 0;
  int m = 0;
  double lo1 = 0.0;
  double hi1 = 0.0;
  double lo2 = 0.0;
  double hi2 = 0.0;
};

struct HarnessFlags {
  std::string config;
  std::string out;
};

// Exit code plus message for a failed command.
struct Failure {
  int code;
  std::string message;
};

Failure Usage(std::string_view flag, const absl::Status& status) {
  return {kExitUsage, absl::StrCat(std::string(flag), ": ", status.message())};
}

Failure Runtime(const absl::Status& status) {
  return {kExitRuntime, std::string(status.message())};
}

void AddPropOptions(CLI::App* sub, PropFlags& f, bool required) {
  auto req = [required](CLI::Option* o) {
    return required ? o->required() : o;
  };
  req(sub->add_option("--p1", f.p1, "group 1 proportion"));
  req(sub->add_option("--n", f.n, "group 1 size"));
  req(sub->add_option("--p2", f.p2, "group 2 proportion"));
  req(sub->add_option("--m", f.m, "group 2 size"));
}

void AddMeanOptions(CLI::App* sub, MeanFlags& f, bool required) {
  auto req = [required](CLI::Option* o) {
    return required ? o->required() : o;
  };
  req(sub->add_option("--mean1", f.mean1, "group 1 mean"));
  req(sub->add_option("--sd1", f.sd1, "group 1 standard deviation"));
  req(sub->add_option("--mean2", f.mean2, "group 2 mean"));
  req(sub->add_option("--sd2", f.sd2, "group 2 standard deviation"));
  req(sub->add_option("--n", f.n, "group 1 size"));
  req(sub->add_option("--m", f.m, "group 2 size"));
  req(sub->add_option("--lo1", f.lo1, "group 1 lower clamping bound"));
  req(sub->add_option("--hi1", f.hi1, "group 1 upper clamping bound"));
  req(sub->add_option("--lo2", f.lo2, "group 2 lower clamping bound"));
  req(sub->add_option("--hi2", f.hi2, "group 2 upper clamping bound"));
}

void AddTestOptions(CLI::App* sub, CommonFlags& c) {
  sub->add_option("--eps", c.eps, "privacy budget per group")->required();
  sub->add_option("--c0", c.c0, "equivalence margin")->required();
  sub->add_option("--alpha", c.alpha, "significance level")
      ->capture_default_str();
  sub->add_option("--H", c.H, "number of matched draws")->capture_default_str();
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_flag("--raw", c.raw, "inputs are raw summaries; privatize first");
  sub->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"text", "csv-line"}))
      ->capture_default_str();
}

struct Validated {
  PrivacyBudget budget;
  EquivalenceSpec spec;
};

absl::StatusOr<Validated> ValidateCommon(const CommonFlags& c,
                                         Failure& failure) {
  absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(c.eps);
  if (!budget.ok()) {
    failure = Usage("--eps", budget.status());
    return budget.status();
  }
  absl::StatusOr<EquivalenceSpec> spec = EquivalenceSpec::Create(c.c0, c.alpha);
  if (!spec.ok()) {
    failure = Usage("--c0/--alpha", spec.status());
    return spec.status();
  }
  const double needed = std::ceil(1.0 / c.alpha - 1e-9);
  if (c.H < 1 || static_cast<double>(c.H) < needed) {
    absl::Status s = absl::InvalidArgumentError(
        absl::StrCat("must be at least ", needed, " for alpha = ", c.alpha));
    failure = Usage("--H", s);
    return s;
  }
  return Validated{*budget, *spec};
}

void PrintResult(std::ostream& out, const CommonFlags& c,
                 const EquivalenceResult& r, std::string_view title,
                 std::string_view released) {
  if (c.format == "csv-line") {
    out << FormatDouble(r.ci_lower) << ',' << FormatDouble(r.ci_upper) << ','
        << (r.equivalent ? "true" : "false") << '\n';
    return;
  }
  out << "ci_lower=" << FormatDouble(r.ci_lower)
      << " ci_upper=" << FormatDouble(r.ci_upper)
      << " equivalent=" << (r.equivalent ? "true" : "false") << '\n';
  const MatchDiagnostics& d = r.draws.diagnostics;
  out << title << '\n'
      << "  released   " << released << '\n'
      << absl::StrFormat("  settings   eps=%g c0=%g alpha=%g H=%d seed=%d\n",
                         c.eps, c.c0, c.alpha, c.H, c.seed)
      << absl::StrFormat("  interval   [%.6f, %.6f] (level %g)\n", r.ci_lower,
                         r.ci_upper, 1.0 - 2.0 * r.alpha)
      << absl::StrFormat("  matching   attempts=%d retries=%d fallbacks=%d\n",
                         d.attempts, d.retries, d.fallbacks)
      << "  decision   "
      << (r.equivalent ? "equivalence shown within (-c0, c0)"
                       : "equivalence not shown")
      << '\n';
}

absl::Status CheckReleasedProportion(std::string_view flag, double p_hat,
                                     int n, const PrivacyBudget& budget,
                                     Failure& failure) {
  const double scale = 1.0 / (n * budget.epsilon());
  const double slack = kMaxReleasedScales * scale;
  if (!std::isfinite(p_hat) || p_hat < -slack || p_hat > 1.0 + slack) {
    absl::Status s = absl::InvalidArgumentError(absl::StrCat(
        "released proportion ", p_hat, " is implausible for n = ", n,
        " and eps = ", budget.epsilon()));
    failure = Usage(flag, s);
    return s;
  }
  return absl::OkStatus();
}

int RunProp(const PropFlags& f, const CommonFlags& c, std::ostream& out,
            Failure& failure) {
  absl::StatusOr<Validated> v = ValidateCommon(c, failure);
  if (!v.ok()) return failure.code;
  if (f.n < 1 || f.m < 1) {
    failure = Usage("--n/--m", absl::InvalidArgumentError("must be >= 1"));
    return failure.code;
  }
  const Rng root = Rng::Make(c.seed);
  double p_hat1 = f.p1;
  double p_hat2 = f.p2;
  if (c.raw) {
    Rng priv = root.Substream(0);
    absl::StatusOr<PrivatizedProportion> x =
        PrivatizeProportion(f.p1, f.n, v->budget, priv);
    if (!x.ok()) {
      failure = Usage("--p1", x.status());
      return failure.code;
    }
    absl::StatusOr<PrivatizedProportion> y =
        PrivatizeProportion(f.p2, f.m, v->budget, priv);
    if (!y.ok()) {
      failure = Usage("--p2", y.status());
      return failure.code;
    }
    p_hat1 = x->p_hat;
    p_hat2 = y->p_hat;
  } else if (!CheckReleasedProportion("--p1", f.p1, f.n, v->budget, failure)
                  .ok() ||
             !CheckReleasedProportion("--p2", f.p2, f.m, v->budget, failure)
                  .ok()) {
    return failure.code;
  }
  absl::StatusOr<EquivalenceResult> r = DpTostProportions(
      p_hat1, f.n, p_hat2, f.m, v->budget, v->spec, PropMatchConfig{.H = c.H},
      root.Substream(1), ThreadsFromEnv());
  if (!r.ok()) {
    failure = Runtime(r.status());
    return failure.code;
  }
  PrintResult(out, c, *r, "DP-TOST for the difference of proportions",
              absl::StrCat("p_hat1=", FormatDouble(p_hat1), " (n=", f.n,
                           ") p_hat2=", FormatDouble(p_hat2), " (m=", f.m,
                           ")"));
  return kExitOk;
}

absl::Status MakeBounds(const MeanFlags& f, ClampBounds* b1, ClampBounds* b2,
                        Failure& failure) {
  absl::StatusOr<ClampBounds> x = ClampBounds::Create(f.lo1, f.hi1);
  if (!x.ok()) {
    failure = Usage("--lo1/--hi1", x.status());
    return x.status();
  }
  absl::StatusOr<ClampBounds> y = ClampBounds::Create(f.lo2, f.hi2);
  if (!y.ok()) {
    failure = Usage("--lo2/--hi2", y.status());
    return y.status();
  }
  *b1 = *x;
  *b2 = *y;
  return absl::OkStatus();
}

int RunMean(const MeanFlags& f, const CommonFlags& c, std::ostream& out,
            Failure& failure) {
  absl::StatusOr<Validated> v = ValidateCommon(c, failure);
  if (!v.ok()) return failure.code;
  if (f.n < 2 || f.m < 2) {
    failure = Usage("--n/--m", absl::InvalidArgumentError("must be >= 2"));
    return failure.code;
  }
  ClampBounds b1 = *ClampBounds::Create(0, 1);
  ClampBounds b2 = b1;
  if (!MakeBounds(f, &b1, &b2, failure).ok()) return failure.code;
  for (double x : {f.mean1, f.sd1, f.mean2, f.sd2}) {
    if (!std::isfinite(x)) {
      failure = Usage("--mean1/--sd1/--mean2/--sd2",
                      absl::InvalidArgumentError("must be finite"));
      return failure.code;
    }
  }

  const Rng root = Rng::Make(c.seed);
  absl::StatusOr<PrivatizedMoments> tx;
  absl::StatusOr<PrivatizedMoments> ty;
  if (c.raw) {
    Rng priv = root.Substream(0);
    tx = PrivatizeMoments(f.mean1, f.sd1, b1, f.n, v->budget, priv);
    if (!tx.ok()) {
      failure = Usage("--mean1/--sd1", tx.status());
      return failure.code;
    }
    ty = PrivatizeMoments(f.mean2, f.sd2, b2, f.m, v->budget, priv);
    if (!ty.ok()) {
      failure = Usage("--mean2/--sd2", ty.status());
      return failure.code;
    }
  } else {
    tx = ReleasedMoments(f.mean1, f.sd1, f.n, b1, v->budget);
    ty = ReleasedMoments(f.mean2, f.sd2, f.m, b2, v->budget);
    if (!tx.ok() || !ty.ok()) {
      failure = Usage("--mean1/--mean2", tx.ok() ? ty.status() : tx.status());
      return failure.code;
    }
  }
  absl::StatusOr<EquivalenceResult> r =
      DpTostMeans(*tx, *ty, v->spec, MeanMatchConfig{.H = c.H},
                  root.Substream(1), ThreadsFromEnv());
  if (!r.ok()) {
    failure = Runtime(r.status());
    return failure.code;
  }
  PrintResult(out, c, *r, "DP-TOST for the difference of clamped means",
              absl::StrCat("mean_hat1=", FormatDouble(tx->mean_hat),
                           " sd_hat1=", FormatDouble(tx->sd_hat), " (n=", f.n,
                           ") mean_hat2=", FormatDouble(ty->mean_hat),
                           " sd_hat2=", FormatDouble(ty->sd_hat), " (m=", f.m,
                           ")"));
  return kExitOk;
}

int RunPrivatize(CLI::App* sub, const std::string& endpoint, const PropFlags& p,
                 const MeanFlags& mf, double eps, uint64_t seed,
                 std::ostream& out, Failure& failure) {
  const std::vector<std::string> needed =
      endpoint == "prop"
          ? std::vector<std::string>{"--p1", "--n", "--p2", "--m"}
          : std::vector<std::string>{"--mean1", "--sd1", "--mean2", "--sd2",
                                     "--n",     "--m",   "--lo1",   "--hi1",
                                     "--lo2",   "--hi2"};
  for (const std::string& flag : needed) {
    if (sub->count(flag) == 0) {
      failure = {kExitUsage,
                 absl::StrCat(flag, " is required for --endpoint ", endpoint)};
      return failure.code;
    }
  }
  absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(eps);
  if (!budget.ok()) {
    failure = Usage("--eps", budget.status());
    return failure.code;
  }
  Rng priv = Rng::Make(seed).Substream(0);
  if (endpoint == "prop") {
    absl::StatusOr<PrivatizedProportion> x =
        PrivatizeProportion(p.p1, p.n, *budget, priv);
    if (!x.ok()) {
      failure = Usage("--p1/--n", x.status());
      return failure.code;
    }
    absl::StatusOr<PrivatizedProportion> y =
        PrivatizeProportion(p.p2, p.m, *budget, priv);
    if (!y.ok()) {
      failure = Usage("--p2/--m", y.status());
      return failure.code;
    }
    out << "p_hat1=" << FormatDouble(x->p_hat)
        << " p_hat2=" << FormatDouble(y->p_hat) << '\n';
    return kExitOk;
  }
  ClampBounds b1 = *ClampBounds::Create(0, 1);
  ClampBounds b2 = b1;
  if (!MakeBounds(mf, &b1, &b2, failure).ok()) return failure.code;
  absl::StatusOr<PrivatizedMoments> x =
      PrivatizeMoments(mf.mean1, mf.sd1, b1, mf.n, *budget, priv);
  if (!x.ok()) {
    failure = Usage("--mean1/--sd1/--n", x.status());
    return failure.code;
  }
  absl::StatusOr<PrivatizedMoments> y =
      PrivatizeMoments(mf.mean2, mf.sd2, b2, mf.m, *budget, priv);
  if (!y.ok()) {
    failure = Usage("--mean2/--sd2/--m", y.status());
    return failure.code;
  }
  out << "mean_hat1=" << FormatDouble(x->mean_hat)
      << " sd_hat1=" << FormatDouble(x->sd_hat)
      << " mean_hat2=" << FormatDouble(y->mean_hat)
      << " sd_hat2=" << FormatDouble(y->sd_hat) << '\n';
  return kExitOk;
}

absl::Status WriteTable(const std::string& path, const CsvTable& table,
                        std::ostream& out) {
  const std::string csv = ToCsv(table);
  if (path == "-") {
    out << csv;
    return absl::OkStatus();
  }
  return WriteTextFile(path, csv);
}

int RunSimulate(const HarnessFlags& h, std::ostream& out, Failure& failure) {
  absl::StatusOr<std::string> text = ReadTextFile(h.config);
  if (!text.ok()) {
    failure = Runtime(text.status());
    return failure.code;
  }
  absl::StatusOr<ScenarioGrid> grid = ParseScenarioGrid(*text);
  if (!grid.ok()) {
    failure = {kExitRuntime,
               absl::StrCat(h.config, ": ", grid.status().message())};
    return failure.code;
  }
  absl::StatusOr<std::vector<RejectionRow>> rows =
      RunScenario(*grid, ThreadsFromEnv());
  if (!rows.ok()) {
    failure = Runtime(rows.status());
    return failure.code;
  }
  if (absl::Status s = WriteTable(h.out, RejectionTable(*rows), out); !s.ok()) {
    failure = Runtime(s);
    return failure.code;
  }
  return kExitOk;
}

int RunEmulate(const HarnessFlags& h, std::ostream& out, Failure& failure) {
  absl::StatusOr<std::string> text = ReadTextFile(h.config);
  if (!text.ok()) {
    failure = Runtime(text.status());
    return failure.code;
  }
  absl::StatusOr<EmulationConfig> cfg = ParseEmulationConfig(*text);
  if (!cfg.ok()) {
    failure = {kExitRuntime,
               absl::StrCat(h.config, ": ", cfg.status().message())};
    return failure.code;
  }
  absl::StatusOr<std::vector<AgreementRow>> rows =
      RunEmulationActg(*cfg, ThreadsFromEnv());
  if (!rows.ok()) {
    failure = Runtime(rows.status());
    return failure.code;
  }
  if (absl::Status s = WriteTable(h.out, AgreementTable(*rows), out); !s.ok()) {
    failure = Runtime(s);
    return failure.code;
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Differentially private two one-sided tests", "dp-tost"};
  app.require_subcommand(1);

  PropFlags prop;
  CommonFlags prop_common;
  CLI::App* prop_cmd =
      app.add_subcommand("prop", "DP-TOST for a difference of proportions");
  AddPropOptions(prop_cmd, prop, /*required=*/true);
  AddTestOptions(prop_cmd, prop_common);

  MeanFlags mean;
  CommonFlags mean_common;
  CLI::App* mean_cmd =
      app.add_subcommand("mean", "DP-TOST for a difference of clamped means");
  AddMeanOptions(mean_cmd, mean, /*required=*/true);
  AddTestOptions(mean_cmd, mean_common);

  PropFlags priv_prop;
  MeanFlags priv_mean;
  std::string endpoint;
  double priv_eps = 0.0;
  uint64_t priv_seed = 0;
  CLI::App* priv_cmd =
      app.add_subcommand("privatize", "release privatized summaries");
  priv_cmd->add_option("--endpoint", endpoint, "prop or mean")
      ->required()
      ->check(CLI::IsMember({"prop", "mean"}));
  priv_cmd->add_option("--p1", priv_prop.p1, "group 1 proportion");
  priv_cmd->add_option("--p2", priv_prop.p2, "group 2 proportion");
  priv_cmd->add_option("--n", priv_prop.n, "group 1 size");
  priv_cmd->add_option("--m", priv_prop.m, "group 2 size");
  priv_cmd->add_option("--mean1", priv_mean.mean1, "group 1 mean");
  priv_cmd->add_option("--sd1", priv_mean.sd1, "group 1 standard deviation");
  priv_cmd->add_option("--mean2", priv_mean.mean2, "group 2 mean");
  priv_cmd->add_option("--sd2", priv_mean.sd2, "group 2 standard deviation");
  priv_cmd->add_option("--lo1", priv_mean.lo1, "group 1 lower bound");
  priv_cmd->add_option("--hi1", priv_mean.hi1, "group 1 upper bound");
  priv_cmd->add_option("--lo2", priv_mean.lo2, "group 2 lower bound");
  priv_cmd->add_option("--hi2", priv_mean.hi2, "group 2 upper bound");
  priv_cmd->add_option("--eps", priv_eps, "privacy budget per group")
      ->required();
  priv_cmd->add_option("--seed", priv_seed, "random seed")
      ->capture_default_str();

  HarnessFlags sim;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "run a size or power study from JSON");
  sim_cmd->add_option("--config", sim.config, "scenario JSON")->required();
  sim_cmd->add_option("--out", sim.out, "output CSV ('-' for stdout)")
      ->required();

  HarnessFlags emu;
  CLI::App* emu_cmd =
      app.add_subcommand("emulate", "run the ACTG 175 emulation from JSON");
  emu_cmd->add_option("--config", emu.config, "emulation JSON")->required();
  emu_cmd->add_option("--out", emu.out, "output CSV ('-' for stdout)")
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Failure failure{kExitOk, ""};
  int code = kExitOk;
  try {
    if (*prop_cmd) {
      code = RunProp(prop, prop_common, out, failure);
    } else if (*mean_cmd) {
      code = RunMean(mean, mean_common, out, failure);
    } else if (*priv_cmd) {
      // The shared flags (--n, --m) live on the proportion struct.
      priv_mean.n = priv_prop.n;
      priv_mean.m = priv_prop.m;
      code = RunPrivatize(priv_cmd, endpoint, priv_prop, priv_mean, priv_eps,
                          priv_seed, out, failure);
    } else if (*sim_cmd) {
      code = RunSimulate(sim, out, failure);
    } else if (*emu_cmd) {
      code = RunEmulate(emu, out, failure);
    }
  } catch (const std::exception& e) {
    failure = {kExitRuntime, e.what()};
    code = kExitRuntime;
  }
  if (code != kExitOk) err << "dp-tost: " << failure.message << '\n';
  return code;
}

}  // namespace dptost
