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


// The dp-tost command line.
//
//   dp-tost prop      --p1 --n --p2 --m --eps --c0 [--alpha --H --seed --raw]
//   dp-tost mean      --mean1 --sd1 --mean2 --sd2 --n --m --lo1 --hi1 --lo2
//                     --hi2 --eps --c0 [--alpha --H --seed --raw]
//   dp-tost privatize --endpoint prop|mean  (raw summaries, --seed)
//   dp-tost simulate  --config grid.json --out results.csv
//   dp-tost emulate   --config emulation.json --out agreement.csv
//
// prop and mean take released summaries unless --raw is given, in which case
// the inputs are privatized first. Seed stream 0 privatizes (also used by
// privatize) and stream 1 drives the matched draws, so privatize followed by
// prop/mean reproduces the --raw pipeline. --format csv-line prints only
// "ci_lower,ci_upper,equivalent".
//
// Exit codes: 0 success or --help, 2 invalid arguments, 3 runtime or config
// error.

#ifndef DPTOST_CLI_H_
#define DPTOST_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace dptost {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace dptost

#endif  // DPTOST_CLI_H_
