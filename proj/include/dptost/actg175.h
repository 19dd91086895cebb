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


// Arm-level summaries of the ACTG 175 trial used by the emulation study.

#ifndef DPTOST_ACTG175_H_
#define DPTOST_ACTG175_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace dptost {

struct TrialArm {
  std::string name;
  int n;
  double mean_log_cd4;
  double sd_log_cd4;
  double off_treat;  // proportion off treatment
};

// Columns: arm,n,mean_log_cd4,sd_log_cd4,off_treat.
absl::StatusOr<std::vector<TrialArm>> ParseTrialArms(std::string_view csv);

// The bundled table (ZDV, ZDV+ddI, ZDV+ddC, ddI).
const std::vector<TrialArm>& Actg175Arms();

}  // namespace dptost

#endif  // DPTOST_ACTG175_H_
