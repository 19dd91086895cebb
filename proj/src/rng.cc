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

#include "dptost/rng.h"

#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dptost {
namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85;

// Stafford variant 13 finalizer (as in SplitMix64).
uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * ctr[0];
    const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * ctr[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

Rng Rng::Make(uint64_t seed) { return Rng(seed, 0, 0); }

Rng Rng::Substream(uint64_t index) const {
  // Depth enters the hash so that [1, 1] and [1] land on different ids.
  const uint64_t child =
      Mix64(Mix64(stream_id_ ^ (0x9E3779B97F4A7C15ULL * (depth_ + 1))) +
            Mix64(index + 0x632BE59BD9B4E019ULL));
  return Rng(seed_, child, depth_ + 1);
}

void Rng::Refill() {
  const std::array<uint32_t, 4> ctr = {
      static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32),
      static_cast<uint32_t>(stream_id_),
      static_cast<uint32_t>(stream_id_ >> 32)};
  const std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed_),
                                       static_cast<uint32_t>(seed_ >> 32)};
  const std::array<uint32_t, 4> out = Philox4x32(ctr, key);
  buffer_[0] = (static_cast<uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<uint64_t>(out[3]) << 32) | out[2];
  buffered_ = 2;
  ++block_;
}

uint64_t Rng::NextU64() {
  if (buffered_ == 0) Refill();
  return buffer_[2 - buffered_--];
}

double Rng::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double Rng::CenteredUniform() {
  // (k + 1/2) / 2^52 is exact for k < 2^52, as is the shift by 1/2.
  return (static_cast<double>(NextU64() >> 12) + 0.5) * 0x1.0p-52 - 0.5;
}

double Rng::StdNormal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = 1.0 - Uniform();  // (0, 1]
  const double u2 = Uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_normal_ = true;
  return radius * std::cos(angle);
}

double Rng::Laplace(double scale) {
  const double u = CenteredUniform();
  if (scale == 0.0) return 0.0;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

double SampleStdNormal(Rng& rng) { return rng.StdNormal(); }

absl::StatusOr<double> SampleLaplace(Rng& rng, double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be finite and >= 0, got ", scale));
  }
  return rng.Laplace(scale);
}

}  // namespace dptost
