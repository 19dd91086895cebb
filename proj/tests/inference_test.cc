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


#include "dptost/inference.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace dptost {
namespace {

EquivalenceSpec Spec(double c0, double alpha = 0.05) {
  return *EquivalenceSpec::Create(c0, alpha);
}

TEST(EmpiricalQuantileTest, NearestRank) {
  const std::vector<double> d = {5, 3, 1, 4, 2};
  EXPECT_EQ(*EmpiricalQuantile(d, 0.5), 3.0);
  EXPECT_EQ(*EmpiricalQuantile(d, 0.05), 1.0);
  EXPECT_EQ(*EmpiricalQuantile(d, 0.2), 1.0);
  EXPECT_EQ(*EmpiricalQuantile(d, 0.21), 2.0);
  EXPECT_EQ(*EmpiricalQuantile(d, 0.99), 5.0);
}

TEST(EmpiricalQuantileTest, Constant) {
  const std::vector<double> d(17, 2.5);
  for (double q : {0.01, 0.3, 0.5, 0.97}) {
    EXPECT_EQ(*EmpiricalQuantile(d, q), 2.5);
  }
}

TEST(EmpiricalQuantileTest, Errors) {
  const std::vector<double> d = {1, 2};
  EXPECT_FALSE(EmpiricalQuantile(d, 0.0).ok());
  EXPECT_FALSE(EmpiricalQuantile(d, 1.0).ok());
  EXPECT_FALSE(EmpiricalQuantile(std::vector<double>{}, 0.5).ok());
  EXPECT_EQ(EmpiricalQuantile(std::vector<double>{1, NAN}, 0.5).status().code(),
            absl::StatusCode::kInternal);
}

TEST(PercentileCiTest, OrderStatistics) {
  std::vector<double> d(1000);
  for (int i = 0; i < 1000; ++i) d[i] = 999 - i;  // reversed 0..999
  const ConfidenceInterval ci = *PercentileCi(d, 0.05);
  EXPECT_EQ(ci.lower, 49.0);   // 50th smallest
  EXPECT_EQ(ci.upper, 949.0);  // 950th smallest
}

TEST(PercentileCiTest, HalfAlphaIsMedian) {
  const std::vector<double> d = {4, 1, 3, 2, 5};
  const ConfidenceInterval ci = *PercentileCi(d, 0.5);
  EXPECT_EQ(ci.lower, 3.0);
  EXPECT_EQ(ci.upper, 3.0);
}

TEST(PercentileCiTest, InsufficientDraws) {
  const std::vector<double> d(19, 0.0);
  EXPECT_EQ(PercentileCi(d, 0.05).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_TRUE(PercentileCi(std::vector<double>(20, 0.0), 0.05).ok());
  EXPECT_FALSE(PercentileCi(d, 0.6).ok());
}

TEST(PercentileCiTest, ReflectionUpToOneRank) {
  Rng rng = Rng::Make(3);
  for (int h : {20, 101, 1000}) {
    std::vector<double> d(h);
    for (double& v : d) v = rng.StdNormal();
    std::vector<double> neg(d);
    for (double& v : neg) v = -v;
    std::vector<double> sorted(d);
    std::sort(sorted.begin(), sorted.end());
    const ConfidenceInterval ci = *PercentileCi(d, 0.05);
    const ConfidenceInterval cn = *PercentileCi(neg, 0.05);
    auto rank = [&](double v) {
      return std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
    };
    EXPECT_LE(std::abs(rank(-cn.upper) - rank(ci.lower)), 1) << h;
    EXPECT_LE(std::abs(rank(-cn.lower) - rank(ci.upper)), 1) << h;
  }
}

TEST(PercentileCiTest, EndpointsAreDraws) {
  Rng rng = Rng::Make(4);
  std::vector<double> d(333);
  for (double& v : d) v = rng.Laplace(2.0);
  const ConfidenceInterval ci = *PercentileCi(d, 0.1);
  EXPECT_NE(std::find(d.begin(), d.end(), ci.lower), d.end());
  EXPECT_NE(std::find(d.begin(), d.end(), ci.upper), d.end());
}

TEST(EquivalenceDecisionTest, StrictInterior) {
  EXPECT_TRUE(EquivalenceDecision({-0.05, 0.05}, 0.1));
  EXPECT_FALSE(EquivalenceDecision({-0.05, 0.1}, 0.1));
  EXPECT_FALSE(EquivalenceDecision({-0.1, 0.05}, 0.1));
  EXPECT_FALSE(EquivalenceDecision({0.2, 0.3}, 0.1));
}

TEST(EquivalenceDecisionTest, ScaleInvariantAndMonotoneInAlpha) {
  Rng rng = Rng::Make(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> d(200);
    const double shift = 0.2 * rng.CenteredUniform();
    for (double& v : d) v = shift + 0.03 * rng.StdNormal();
    const ConfidenceInterval ci = *PercentileCi(d, 0.05);
    const bool base = EquivalenceDecision(ci, 0.1);
    for (double k : {0.5, 3.0, 1000.0}) {
      std::vector<double> scaled(d);
      for (double& v : scaled) v *= k;
      EXPECT_EQ(EquivalenceDecision(*PercentileCi(scaled, 0.05), 0.1 * k),
                base);
    }
    if (EquivalenceDecision(*PercentileCi(d, 0.01), 0.1)) {
      EXPECT_TRUE(base);
    }
  }
}

TEST(DpTostProportionsTest, LargeSampleHighBudgetIsEquivalent) {
  const EquivalenceResult r = *DpTostProportions(
      0.5, 100000, 0.5, 100000, *PrivacyBudget::Create(10), Spec(0.1), {},
      Rng::Make(1));
  EXPECT_TRUE(r.equivalent);
  EXPECT_LT(r.ci_upper - r.ci_lower, 0.02);
  EXPECT_EQ(r.draws.H(), 1000);
  EXPECT_EQ(r.alpha, 0.05);
  EXPECT_EQ(r.c0, 0.1);
}

TEST(DpTostProportionsTest, FarEffectIsNotEquivalent) {
  const EquivalenceResult r =
      *DpTostProportions(0.9, 500, 0.5, 500, *PrivacyBudget::Create(1),
                         Spec(0.1), {}, Rng::Make(2));
  EXPECT_FALSE(r.equivalent);
  EXPECT_GT(r.ci_lower, 0.1);
}

TEST(DpTostProportionsTest, Deterministic) {
  const PrivacyBudget b = *PrivacyBudget::Create(0.5);
  const EquivalenceResult r1 =
      *DpTostProportions(0.41, 532, 0.33, 522, b, Spec(0.1), {}, Rng::Make(7));
  const EquivalenceResult r2 = *DpTostProportions(0.41, 532, 0.33, 522, b,
                                                  Spec(0.1), {}, Rng::Make(7),
                                                  3);
  EXPECT_EQ(r1.ci_lower, r2.ci_lower);
  EXPECT_EQ(r1.ci_upper, r2.ci_upper);
  EXPECT_EQ(r1.draws.draws, r2.draws.draws);
}

TEST(DpTostProportionsTest, TooFewDraws) {
  PropMatchConfig cfg;
  cfg.H = 10;
  EXPECT_EQ(DpTostProportions(0.5, 100, 0.5, 100, *PrivacyBudget::Create(1),
                              Spec(0.1), cfg, Rng::Make(1))
                .status()
                .code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(DpTostMeansTest, IdenticalTargetsGiveSymmetricCi) {
  const PrivatizedMoments t = *ReleasedMoments(
      0.5, 0.2, 200, *ClampBounds::Create(0, 1), *PrivacyBudget::Create(2));
  MeanMatchConfig cfg;
  cfg.H = 400;
  const EquivalenceResult r =
      *DpTostMeans(t, t, Spec(0.2), cfg, Rng::Make(3));
  EXPECT_NEAR(r.ci_lower + r.ci_upper, 0.0,
              0.25 * (r.ci_upper - r.ci_lower));
}

TEST(DpTostMeansTest, NearNoiselessWideBoundsIsEquivalent) {
  const ClampBounds wide = *ClampBounds::Create(-1e6, 1e6);
  const PrivacyBudget huge = *PrivacyBudget::Create(1e12);
  const PrivatizedMoments x = *ReleasedMoments(0.0, 1.0, 10000, wide, huge);
  MeanMatchConfig cfg;
  cfg.H = 200;
  const EquivalenceResult r =
      *DpTostMeans(x, x, Spec(0.5), cfg, Rng::Make(4));
  EXPECT_TRUE(r.equivalent);
  EXPECT_TRUE(TostMeans(0.0, 1.0, 10000, 0.0, 1.0, 10000, Spec(0.5))
                  ->equivalent);
}

TEST(DpTostMeansTest, GapOfThreeMarginsIsNotEquivalent) {
  const ClampBounds b = *ClampBounds::Create(-4, 4);
  const PrivacyBudget eps = *PrivacyBudget::Create(2);
  const PrivatizedMoments x = *ReleasedMoments(1.5, 1.0, 200, b, eps);
  const PrivatizedMoments y = *ReleasedMoments(0.0, 1.0, 200, b, eps);
  MeanMatchConfig cfg;
  cfg.H = 200;
  EXPECT_FALSE(DpTostMeans(x, y, Spec(0.5), cfg, Rng::Make(5))->equivalent);
}

}  // namespace
}  // namespace dptost
