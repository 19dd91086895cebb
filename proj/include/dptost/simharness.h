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


// Monte Carlo size and power studies and the ACTG 175 emulation.
//
// Random streams: replicate b of grid entry k draws from
// Substream(b).Substream(k) of the seed's root stream. Inside a replicate,
// Substream(0) generates the data (shared by every epsilon), and epsilon
// index e uses Substream(1 + 2e) to privatize and Substream(2 + 2e) for the
// matched draws. Results never depend on the thread count.

#ifndef DPTOST_SIMHARNESS_H_
#define DPTOST_SIMHARNESS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dptost/actg175.h"
#include "dptost/csv.h"
#include "dptost/privacy.h"
#include "dptost/rng.h"
#include "dptost/scenario.h"

namespace dptost {

inline constexpr char kMethodTost[] = "tost";
inline constexpr char kMethodDpTost[] = "dp_tost";

// Summaries of one simulated normal sample, raw and after clamping.
struct GroupMoments {
  double mean;
  double sd;
  double clamped_mean;
  double clamped_sd;
};

struct ProportionData {
  double xbar;
  double ybar;
};

struct MeanData {
  GroupMoments x;
  GroupMoments y;
};

// Binomial(n, pi) / n.
absl::StatusOr<double> SampleProportion(double pi, int n, Rng& rng);

// n draws of N(mu, sigma^2) reduced to raw and clamped mean and sd.
absl::StatusOr<GroupMoments> SampleGroupMoments(double mu, double sigma, int n,
                                                const ClampBounds& bounds,
                                                Rng& rng);

absl::StatusOr<ProportionData> GenerateProportionData(double pi1, double pi2,
                                                      int n, int m, Rng& rng);
absl::StatusOr<MeanData> GenerateMeanData(const ParamPair& params, int n,
                                          int m, const ClampBounds& bounds1,
                                          const ClampBounds& bounds2,
                                          Rng& rng);

// One output line of a size or power study. Non-private rows carry
// epsilon = +inf.
struct RejectionRow {
  Endpoint endpoint;
  int n;
  int m;
  double epsilon;
  double reference;  // group-1 parameter
  double effect;     // group1 - group2
  std::string method;
  int64_t rejections;
  int64_t replicates;

  double rate() const {
    return static_cast<double>(rejections) / static_cast<double>(replicates);
  }
};

// Rejection fraction for every grid entry: one non-private row, then one
// DP-TOST row per epsilon.
absl::StatusOr<std::vector<RejectionRow>> RunPowerCurve(
    const ScenarioGrid& grid, int threads = 1);

// Entries sharing a group-1 value are boundary points of one cell; each
// method reports the boundary point with the most rejections (first on ties).
absl::StatusOr<std::vector<RejectionRow>> RunSizeExperiment(
    const ScenarioGrid& grid, int threads = 1);

// Dispatches on grid.experiment.
absl::StatusOr<std::vector<RejectionRow>> RunScenario(const ScenarioGrid& grid,
                                                      int threads = 1);

// endpoint,n,m,epsilon,reference,effect,method,rejections,replicates,
// rejection_rate
CsvTable RejectionTable(const std::vector<RejectionRow>& rows);

struct AgreementRow {
  std::string comparison_label;
  TrialOutcome outcome;
  double true_effect;
  bool within_margin;
  double epsilon;
  int64_t replicates;
  double nonprivate_reject_pct;
  double dp_reject_pct;
  double both_equiv_pct;
  double both_nonequiv_pct;
  double discord_dp_rejects_pct;  // DP-TOST rejects, non-private does not
  double discord_dp_cannot_pct;   // non-private rejects, DP-TOST does not
};

// Margins used by the emulation: 0.1 for off_treat, log(1.1) for log_cd4.
double EmulationMargin(TrialOutcome outcome);
// [log 100, log 1500].
ClampBounds EmulationCd4Bounds();

// All pairwise arm comparisons (i < j in table order) for each epsilon. Each
// arm is simulated, privatized and matched once per replicate and epsilon;
// comparisons difference the per-arm matched draws.
absl::StatusOr<std::vector<AgreementRow>> RunEmulationActg(
    const EmulationConfig& cfg, int threads = 1,
    const std::vector<TrialArm>& arms = Actg175Arms());

// comparison,outcome,epsilon,both_equiv_pct,both_nonequiv_pct,np_only_pct,
// dp_only_pct
CsvTable AgreementTable(const std::vector<AgreementRow>& rows);

}  // namespace dptost

#endif  // DPTOST_SIMHARNESS_H_
