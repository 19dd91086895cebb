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


// Experiment configurations for the simulation harness and their JSON form.
//
// Size/power grid:
//   {
//     "endpoint": "proportion" | "mean",
//     "experiment": "power" | "size",            (default "power")
//     "param_grid": [[p1, p2], ...] or [[mu1, mu2, sigma1, sigma2], ...],
//     "n": 800, "m": 800,
//     "epsilon_list": [0.5, 1],
//     "c0": 0.1, "alpha": 0.05, "H": 1000, "B": 10000, "seed": 0,
//     "clamping": {"center": 0, "half_width": 2}
//               | {"center_offset": -0.25, "half_width": 2}
//               | {"bounds": [[a1, b1], [a2, b2]]}
//   }
// "center_offset" is relative to mu1 of each grid entry. Clamping is required
// for the mean endpoint and rejected for proportions.
//
// ACTG 175 emulation:
//   {"outcome": "off_treat" | "log_cd4", "epsilon_list": [...], "B": 1000,
//    "H": 1000, "seed": 0, "alpha": 0.05}
//
// Unknown keys are errors.

#ifndef DPTOST_SCENARIO_H_
#define DPTOST_SCENARIO_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dptost/privacy.h"

namespace dptost {

enum class Endpoint { kProportion, kMean };
enum class Experiment { kPower, kSize };
enum class TrialOutcome { kOffTreat, kLogCd4 };

std::string_view EndpointName(Endpoint endpoint);
std::string_view TrialOutcomeName(TrialOutcome outcome);

// (pi1, pi2) or (mu1, mu2, sigma1, sigma2).
struct ParamPair {
  double group1;
  double group2;
  double sigma1 = 0.0;
  double sigma2 = 0.0;

  double effect() const { return group1 - group2; }
};

struct Clamping {
  std::optional<double> center;
  double center_offset = 0.0;
  double half_width = 0.0;
  std::optional<std::array<std::array<double, 2>, 2>> bounds;

  // Bounds for group 0 or 1 of `params`.
  absl::StatusOr<ClampBounds> ForGroup(int group,
                                       const ParamPair& params) const;
};

struct ScenarioGrid {
  Endpoint endpoint = Endpoint::kProportion;
  Experiment experiment = Experiment::kPower;
  std::vector<ParamPair> param_grid;
  int n = 0;
  int m = 0;
  std::vector<double> epsilon_list;
  double c0 = 0.0;
  double alpha = 0.05;
  int H = 1000;
  int B = 0;
  std::optional<Clamping> clamping;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

struct EmulationConfig {
  TrialOutcome outcome = TrialOutcome::kOffTreat;
  std::vector<double> epsilon_list;
  int B = 1000;
  int H = 1000;
  uint64_t seed = 0;
  double alpha = 0.05;

  absl::Status Validate() const;
};

absl::StatusOr<ScenarioGrid> ParseScenarioGrid(std::string_view json);
absl::StatusOr<EmulationConfig> ParseEmulationConfig(std::string_view json);

}  // namespace dptost

#endif  // DPTOST_SCENARIO_H_
