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

#ifndef DPTOST_RNG_H_
#define DPTOST_RNG_H_

#include <array>
#include <cstdint>

#include "absl/status/statusor.h"

namespace dptost {

// Philox4x32-10 block function. Exposed for known-answer tests.
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// Deterministic, splittable random number generator.
//
// Output is a pure function of (seed, stream path, draw index). The seed is the
// Philox key; the stream path is folded into a 64-bit stream id that occupies
// the upper half of the 128-bit counter, while the lower half counts blocks.
// Two streams with different ids therefore never evaluate the same counter
// block. A child obtained with Substream() does not depend on how many values
// the parent has already produced.
//
// An Rng is single-owner. Concurrent tasks each get their own Substream().
//
// Floating-point draws go through the platform libm (log, cos, sin), so
// results are bit-identical for a given build and toolchain.
class Rng {
 public:
  // Root generator with an empty stream path. Any seed, including 0, is valid.
  static Rng Make(uint64_t seed);

  // Child generator whose path is this path extended by `index`.
  Rng Substream(uint64_t index) const;

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }
  int depth() const { return depth_; }

  uint64_t NextU64();

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();

  // Uniform on (-1/2, 1/2); never returns an endpoint.
  double CenteredUniform();

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double StdNormal();

  // Laplace(0, scale) by inverse CDF. Consumes one draw even when scale is 0.
  // The caller guarantees scale >= 0.
  double Laplace(double scale);

  // Bernoulli(p) for p in [0, 1].
  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  Rng(uint64_t seed, uint64_t stream_id, int depth)
      : seed_(seed), stream_id_(stream_id), depth_(depth) {}

  void Refill();

  uint64_t seed_;
  uint64_t stream_id_;
  int depth_;
  uint64_t block_ = 0;
  std::array<uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

// One draw from N(0, 1).
double SampleStdNormal(Rng& rng);

// One draw from Laplace(0, scale); exactly 0 when scale is 0.
// Returns InvalidArgument for a negative or non-finite scale.
absl::StatusOr<double> SampleLaplace(Rng& rng, double scale);

}  // namespace dptost

#endif  // DPTOST_RNG_H_
