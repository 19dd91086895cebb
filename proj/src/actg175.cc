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


#include "dptost/actg175.h"

#include <cmath>
#include <cstdlib>
#include <iostream>

#include "absl/strings/str_cat.h"
#include "actg175_data.h"
#include "dptost/csv.h"

namespace dptost {

absl::StatusOr<std::vector<TrialArm>> ParseTrialArms(std::string_view csv) {
  absl::StatusOr<CsvTable> table = ParseCsv(csv);
  if (!table.ok()) return table.status();
  const std::vector<std::string> expected = {"arm", "n", "mean_log_cd4",
                                             "sd_log_cd4", "off_treat"};
  if (table->header != expected) {
    return absl::InvalidArgumentError(
        "arm table header must be arm,n,mean_log_cd4,sd_log_cd4,off_treat");
  }
  std::vector<TrialArm> arms;
  for (const auto& row : table->rows) {
    TrialArm arm{.name = row[0],
                 .n = 0,
                 .mean_log_cd4 = 0.0,
                 .sd_log_cd4 = 0.0,
                 .off_treat = 0.0};
    double values[4];
    for (int i = 0; i < 4; ++i) {
      absl::StatusOr<double> v = ParseDouble(row[i + 1]);
      if (!v.ok()) return v.status();
      values[i] = *v;
    }
    if (values[0] < 2 || values[0] != std::floor(values[0])) {
      return absl::InvalidArgumentError(
          absl::StrCat("arm ", arm.name, ": n must be an integer >= 2"));
    }
    arm.n = static_cast<int>(values[0]);
    arm.mean_log_cd4 = values[1];
    arm.sd_log_cd4 = values[2];
    arm.off_treat = values[3];
    if (!(arm.sd_log_cd4 > 0.0) || !(arm.off_treat >= 0.0) ||
        !(arm.off_treat <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("arm ", arm.name, ": invalid sd or proportion"));
    }
    arms.push_back(std::move(arm));
  }
  return arms;
}

const std::vector<TrialArm>& Actg175Arms() {
  static const std::vector<TrialArm>* arms = [] {
    absl::StatusOr<std::vector<TrialArm>> parsed =
        ParseTrialArms(internal::kActg175ArmsCsv);
    if (!parsed.ok()) {
      std::cerr << "bundled arm table is corrupt: " << parsed.status() << "\n";
      std::abort();
    }
    return new std::vector<TrialArm>(*std::move(parsed));
  }();
  return *arms;
}

}  // namespace dptost
