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

// Derivative-free simplex minimization of a function of two variables over a
// box. Trial points are projected onto the box before evaluation.

#ifndef DPTOST_NELDER_MEAD_H_
#define DPTOST_NELDER_MEAD_H_

#include <algorithm>
#include <array>
#include <cmath>

namespace dptost {

using Point2 = std::array<double, 2>;

struct Box2 {
  Point2 lower;
  Point2 upper;

  Point2 Project(const Point2& p) const {
    return {std::clamp(p[0], lower[0], upper[0]),
            std::clamp(p[1], lower[1], upper[1])};
  }
  bool Contains(const Point2& p) const {
    return p[0] >= lower[0] && p[0] <= upper[0] && p[1] >= lower[1] &&
           p[1] <= upper[1];
  }
};

struct NelderMeadOptions {
  double tolerance = 1e-8;
  int max_iter = 500;
  // Initial simplex edge lengths along each axis. Zero picks 10% of the box
  // extent (or 1e-3 when the extent is infinite).
  Point2 initial_step = {0.0, 0.0};
};

struct NelderMeadResult {
  Point2 x;
  double value;
  bool converged;
  int iterations;
  int evaluations;
};

// Converged when the simplex spread in value is <= tolerance and every vertex
// lies within tolerance * (1 + |x_best|) of the best vertex (per coordinate).
// The returned value never exceeds f(init).
template <typename F>
NelderMeadResult NelderMead(F&& f, const Point2& init, const Box2& box,
                            const NelderMeadOptions& options) {
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  NelderMeadResult result{};
  std::array<Point2, 3> simplex;
  std::array<double, 3> values;
  auto eval = [&](const Point2& p) {
    ++result.evaluations;
    return f(p);
  };

  simplex[0] = box.Project(init);
  for (int axis = 0; axis < 2; ++axis) {
    double step = options.initial_step[axis];
    if (step <= 0.0) {
      const double extent = box.upper[axis] - box.lower[axis];
      step = std::isfinite(extent) ? 0.1 * extent : 1e-3;
    }
    Point2 vertex = simplex[0];
    // Step toward the side of the box with room.
    if (vertex[axis] + step > box.upper[axis]) step = -step;
    vertex[axis] += step;
    simplex[axis + 1] = box.Project(vertex);
  }
  for (int i = 0; i < 3; ++i) values[i] = eval(simplex[i]);

  auto sort_simplex = [&] {
    std::array<int, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
    const std::array<Point2, 3> s = simplex;
    const std::array<double, 3> v = values;
    for (int i = 0; i < 3; ++i) {
      simplex[i] = s[order[i]];
      values[i] = v[order[i]];
    }
  };
  auto is_converged = [&] {
    if (values[2] - values[0] > options.tolerance) return false;
    for (int i = 1; i < 3; ++i) {
      for (int axis = 0; axis < 2; ++axis) {
        const double scale = 1.0 + std::abs(simplex[0][axis]);
        if (std::abs(simplex[i][axis] - simplex[0][axis]) >
            options.tolerance * scale) {
          return false;
        }
      }
    }
    return true;
  };

  sort_simplex();
  while (result.iterations < options.max_iter) {
    if (is_converged()) {
      result.converged = true;
      break;
    }
    ++result.iterations;

    const Point2 centroid = {0.5 * (simplex[0][0] + simplex[1][0]),
                             0.5 * (simplex[0][1] + simplex[1][1])};
    auto along = [&](double t) {
      return box.Project({centroid[0] + t * (simplex[2][0] - centroid[0]),
                          centroid[1] + t * (simplex[2][1] - centroid[1])});
    };

    const Point2 reflected = along(-kReflect);
    const double f_reflected = eval(reflected);
    if (f_reflected < values[0]) {
      const Point2 expanded = along(-kExpand);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[2] = expanded;
        values[2] = f_expanded;
      } else {
        simplex[2] = reflected;
        values[2] = f_reflected;
      }
    } else if (f_reflected < values[1]) {
      simplex[2] = reflected;
      values[2] = f_reflected;
    } else {
      const bool outside = f_reflected < values[2];
      const Point2 contracted = outside ? along(-kContract) : along(kContract);
      const double f_contracted = eval(contracted);
      if (f_contracted < (outside ? f_reflected : values[2])) {
        simplex[2] = contracted;
        values[2] = f_contracted;
      } else {
        for (int i = 1; i < 3; ++i) {
          simplex[i] = box.Project(
              {simplex[0][0] + kShrink * (simplex[i][0] - simplex[0][0]),
               simplex[0][1] + kShrink * (simplex[i][1] - simplex[0][1])});
          values[i] = eval(simplex[i]);
        }
      }
    }
    sort_simplex();
  }
  if (!result.converged && is_converged()) result.converged = true;
  result.x = simplex[0];
  result.value = values[0];
  return result;
}

}  // namespace dptost

#endif  // DPTOST_NELDER_MEAD_H_
