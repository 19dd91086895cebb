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


#include "dptost/scenario.h"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "nlohmann/json.hpp"

namespace dptost {
namespace {

using Json = nlohmann::json;

absl::Status CheckKeys(const Json& obj, std::string_view where,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "unknown key '", key, "' in ", std::string(where), " (allowed: ",
          absl::StrJoin(allowed, ", ",
                        [](std::string* out, std::string_view k) {
                          out->append(k.data(), k.size());
                        }),
          ")"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Json> ParseObject(std::string_view text) {
  Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) return absl::InvalidArgumentError("malformed JSON");
  if (!doc.is_object()) {
    return absl::InvalidArgumentError("config must be a JSON object");
  }
  return doc;
}

absl::StatusOr<double> GetNumber(const Json& obj, const std::string& key) {
  const Json& v = obj.at(key);
  if (!v.is_number()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", key, "' must be a number"));
  }
  return v.get<double>();
}

absl::StatusOr<int> GetInt(const Json& obj, const std::string& key) {
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<int64_t>() < 0 ||
      v.get<int64_t>() > std::numeric_limits<int>::max()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", key, "' must be a non-negative integer"));
  }
  return static_cast<int>(v.get<int64_t>());
}

absl::StatusOr<uint64_t> GetSeed(const Json& obj) {
  const Json& v = obj.at("seed");
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_number_integer() && v.get<int64_t>() >= 0) {
    return static_cast<uint64_t>(v.get<int64_t>());
  }
  return absl::InvalidArgumentError("'seed' must be an unsigned integer");
}

absl::StatusOr<std::vector<double>> GetNumberList(const Json& v,
                                                  const std::string& what) {
  if (!v.is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", what, "' must be an array"));
  }
  std::vector<double> out;
  for (const Json& e : v) {
    if (!e.is_number()) {
      return absl::InvalidArgumentError(
          absl::StrCat("'", what, "' must contain only numbers"));
    }
    out.push_back(e.get<double>());
  }
  return out;
}

absl::StatusOr<std::string> GetString(const Json& obj, const std::string& key) {
  const Json& v = obj.at(key);
  if (!v.is_string()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", key, "' must be a string"));
  }
  return v.get<std::string>();
}

absl::StatusOr<Clamping> ParseClamping(const Json& v) {
  if (!v.is_object()) {
    return absl::InvalidArgumentError("'clamping' must be an object");
  }
  if (absl::Status s = CheckKeys(
          v, "clamping", {"center", "center_offset", "half_width", "bounds"});
      !s.ok()) {
    return s;
  }
  Clamping c;
  if (v.contains("bounds")) {
    if (v.size() != 1) {
      return absl::InvalidArgumentError(
          "'clamping.bounds' cannot be combined with other clamping keys");
    }
    const Json& b = v.at("bounds");
    if (!b.is_array() || b.size() != 2) {
      return absl::InvalidArgumentError(
          "'clamping.bounds' must be [[a1, b1], [a2, b2]]");
    }
    std::array<std::array<double, 2>, 2> bounds;
    for (int g = 0; g < 2; ++g) {
      absl::StatusOr<std::vector<double>> pair =
          GetNumberList(b[g], "clamping.bounds");
      if (!pair.ok()) return pair.status();
      if (pair->size() != 2) {
        return absl::InvalidArgumentError(
            "'clamping.bounds' entries must be [lower, upper]");
      }
      bounds[g] = {(*pair)[0], (*pair)[1]};
    }
    c.bounds = bounds;
    return c;
  }
  if (!v.contains("half_width")) {
    return absl::InvalidArgumentError(
        "'clamping' needs 'half_width' or 'bounds'");
  }
  if (v.contains("center") && v.contains("center_offset")) {
    return absl::InvalidArgumentError(
        "'clamping' takes either 'center' or 'center_offset', not both");
  }
  absl::StatusOr<double> hw = GetNumber(v, "half_width");
  if (!hw.ok()) return hw.status();
  c.half_width = *hw;
  if (v.contains("center")) {
    absl::StatusOr<double> center = GetNumber(v, "center");
    if (!center.ok()) return center.status();
    c.center = *center;
  }
  if (v.contains("center_offset")) {
    absl::StatusOr<double> offset = GetNumber(v, "center_offset");
    if (!offset.ok()) return offset.status();
    c.center_offset = *offset;
  }
  return c;
}

absl::Status CheckEpsilons(const std::vector<double>& eps) {
  if (eps.empty()) return absl::InvalidArgumentError("epsilon_list is empty");
  for (double e : eps) {
    if (!(e > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("epsilon must be > 0, got ", e));
    }
  }
  return absl::OkStatus();
}

absl::Status CheckAlphaAndH(double alpha, int h) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must lie in (0, 0.5), got ", alpha));
  }
  if (static_cast<double>(h) < std::ceil(1.0 / alpha - 1e-9)) {
    return absl::InvalidArgumentError(
        absl::StrCat("H = ", h, " is too small for alpha = ", alpha));
  }
  return absl::OkStatus();
}

}  // namespace

std::string_view EndpointName(Endpoint endpoint) {
  return endpoint == Endpoint::kProportion ? "proportion" : "mean";
}

std::string_view TrialOutcomeName(TrialOutcome outcome) {
  return outcome == TrialOutcome::kOffTreat ? "off_treat" : "log_cd4";
}

absl::StatusOr<ClampBounds> Clamping::ForGroup(int group,
                                               const ParamPair& params) const {
  if (bounds.has_value()) {
    const auto& b = (*bounds)[group == 0 ? 0 : 1];
    return ClampBounds::Create(b[0], b[1]);
  }
  const double c = center.value_or(params.group1 + center_offset);
  return ClampBounds::Create(c - half_width, c + half_width);
}

absl::Status ScenarioGrid::Validate() const {
  if (param_grid.empty()) {
    return absl::InvalidArgumentError("param_grid is empty");
  }
  const int min_n = endpoint == Endpoint::kMean ? 2 : 1;
  if (n < min_n || m < min_n) {
    return absl::InvalidArgumentError(
        absl::StrCat("n and m must be >= ", min_n));
  }
  if (absl::Status s = CheckEpsilons(epsilon_list); !s.ok()) return s;
  if (!(c0 > 0.0)) return absl::InvalidArgumentError("c0 must be > 0");
  if (absl::Status s = CheckAlphaAndH(alpha, H); !s.ok()) return s;
  if (B < 1) return absl::InvalidArgumentError("B must be >= 1");

  for (const ParamPair& p : param_grid) {
    if (endpoint == Endpoint::kProportion) {
      if (!(p.group1 >= 0.0 && p.group1 <= 1.0 && p.group2 >= 0.0 &&
            p.group2 <= 1.0)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "proportions must lie in [0, 1], got (", p.group1, ", ", p.group2,
            ")"));
      }
    } else {
      if (!std::isfinite(p.group1) || !std::isfinite(p.group2) ||
          !(p.sigma1 > 0.0) || !(p.sigma2 > 0.0)) {
        return absl::InvalidArgumentError(
            "mean grid entries need finite means and sigma > 0");
      }
      if (!clamping.has_value()) {
        return absl::InvalidArgumentError("the mean endpoint needs 'clamping'");
      }
      for (int g = 0; g < 2; ++g) {
        if (absl::StatusOr<ClampBounds> b = clamping->ForGroup(g, p); !b.ok()) {
          return b.status();
        }
      }
    }
    if (experiment == Experiment::kSize &&
        std::abs(std::abs(p.effect()) - c0) > 1e-9) {
      return absl::InvalidArgumentError(absl::StrCat(
          "size experiments need |group1 - group2| = c0, got effect ",
          p.effect()));
    }
  }
  if (endpoint == Endpoint::kProportion && clamping.has_value()) {
    return absl::InvalidArgumentError(
        "'clamping' applies only to the mean endpoint");
  }
  return absl::OkStatus();
}

absl::Status EmulationConfig::Validate() const {
  if (absl::Status s = CheckEpsilons(epsilon_list); !s.ok()) return s;
  if (absl::Status s = CheckAlphaAndH(alpha, H); !s.ok()) return s;
  if (B < 1) return absl::InvalidArgumentError("B must be >= 1");
  return absl::OkStatus();
}

absl::StatusOr<ScenarioGrid> ParseScenarioGrid(std::string_view json) {
  absl::StatusOr<Json> doc = ParseObject(json);
  if (!doc.ok()) return doc.status();
  if (absl::Status s = CheckKeys(
          *doc, "scenario",
          {"endpoint", "experiment", "param_grid", "n", "m", "epsilon_list",
           "c0", "alpha", "H", "B", "clamping", "seed"});
      !s.ok()) {
    return s;
  }
  for (const char* key :
       {"endpoint", "param_grid", "n", "m", "epsilon_list", "c0", "B"}) {
    if (!doc->contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing required key '", key, "'"));
    }
  }

  ScenarioGrid grid;
  absl::StatusOr<std::string> endpoint = GetString(*doc, "endpoint");
  if (!endpoint.ok()) return endpoint.status();
  if (*endpoint == "proportion") {
    grid.endpoint = Endpoint::kProportion;
  } else if (*endpoint == "mean") {
    grid.endpoint = Endpoint::kMean;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("'endpoint' must be proportion or mean, got ", *endpoint));
  }
  if (doc->contains("experiment")) {
    absl::StatusOr<std::string> exp = GetString(*doc, "experiment");
    if (!exp.ok()) return exp.status();
    if (*exp == "power") {
      grid.experiment = Experiment::kPower;
    } else if (*exp == "size") {
      grid.experiment = Experiment::kSize;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("'experiment' must be power or size, got ", *exp));
    }
  }

  const Json& params = doc->at("param_grid");
  if (!params.is_array()) {
    return absl::InvalidArgumentError("'param_grid' must be an array");
  }
  const size_t arity = grid.endpoint == Endpoint::kProportion ? 2 : 4;
  for (const Json& entry : params) {
    absl::StatusOr<std::vector<double>> v = GetNumberList(entry, "param_grid");
    if (!v.ok()) return v.status();
    if (v->size() != arity) {
      return absl::InvalidArgumentError(absl::StrCat(
          "'param_grid' entries for the ", *endpoint, " endpoint have ", arity,
          " numbers"));
    }
    ParamPair p{(*v)[0], (*v)[1]};
    if (arity == 4) {
      p.sigma1 = (*v)[2];
      p.sigma2 = (*v)[3];
    }
    grid.param_grid.push_back(p);
  }

  absl::StatusOr<int> n = GetInt(*doc, "n");
  if (!n.ok()) return n.status();
  grid.n = *n;
  absl::StatusOr<int> m = GetInt(*doc, "m");
  if (!m.ok()) return m.status();
  grid.m = *m;
  absl::StatusOr<std::vector<double>> eps =
      GetNumberList(doc->at("epsilon_list"), "epsilon_list");
  if (!eps.ok()) return eps.status();
  grid.epsilon_list = *std::move(eps);
  absl::StatusOr<double> c0 = GetNumber(*doc, "c0");
  if (!c0.ok()) return c0.status();
  grid.c0 = *c0;
  absl::StatusOr<int> b = GetInt(*doc, "B");
  if (!b.ok()) return b.status();
  grid.B = *b;
  if (doc->contains("alpha")) {
    absl::StatusOr<double> alpha = GetNumber(*doc, "alpha");
    if (!alpha.ok()) return alpha.status();
    grid.alpha = *alpha;
  }
  if (doc->contains("H")) {
    absl::StatusOr<int> h = GetInt(*doc, "H");
    if (!h.ok()) return h.status();
    grid.H = *h;
  }
  if (doc->contains("seed")) {
    absl::StatusOr<uint64_t> seed = GetSeed(*doc);
    if (!seed.ok()) return seed.status();
    grid.seed = *seed;
  }
  if (doc->contains("clamping")) {
    absl::StatusOr<Clamping> clamping = ParseClamping(doc->at("clamping"));
    if (!clamping.ok()) return clamping.status();
    grid.clamping = *clamping;
  }
  if (absl::Status s = grid.Validate(); !s.ok()) return s;
  return grid;
}

absl::StatusOr<EmulationConfig> ParseEmulationConfig(std::string_view json) {
  absl::StatusOr<Json> doc = ParseObject(json);
  if (!doc.ok()) return doc.status();
  if (absl::Status s =
          CheckKeys(*doc, "emulation",
                    {"outcome", "epsilon_list", "B", "H", "seed", "alpha"});
      !s.ok()) {
    return s;
  }
  for (const char* key : {"outcome", "epsilon_list"}) {
    if (!doc->contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing required key '", key, "'"));
    }
  }
  EmulationConfig cfg;
  absl::StatusOr<std::string> outcome = GetString(*doc, "outcome");
  if (!outcome.ok()) return outcome.status();
  if (*outcome == "off_treat") {
    cfg.outcome = TrialOutcome::kOffTreat;
  } else if (*outcome == "log_cd4") {
    cfg.outcome = TrialOutcome::kLogCd4;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("'outcome' must be off_treat or log_cd4, got ", *outcome));
  }
  absl::StatusOr<std::vector<double>> eps =
      GetNumberList(doc->at("epsilon_list"), "epsilon_list");
  if (!eps.ok()) return eps.status();
  cfg.epsilon_list = *std::move(eps);
  if (doc->contains("B")) {
    absl::StatusOr<int> b = GetInt(*doc, "B");
    if (!b.ok()) return b.status();
    cfg.B = *b;
  }
  if (doc->contains("H")) {
    absl::StatusOr<int> h = GetInt(*doc, "H");
    if (!h.ok()) return h.status();
    cfg.H = *h;
  }
  if (doc->contains("seed")) {
    absl::StatusOr<uint64_t> seed = GetSeed(*doc);
    if (!seed.ok()) return seed.status();
    cfg.seed = *seed;
  }
  if (doc->contains("alpha")) {
    absl::StatusOr<double> alpha = GetNumber(*doc, "alpha");
    if (!alpha.ok()) return alpha.status();
    cfg.alpha = *alpha;
  }
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  return cfg;
}

}  // namespace dptost
