// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Symmetric non-increasing rearrangement on the discrete circle.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "rshe/grid.hpp"

namespace rshe {

/// Storage indices ordered by |x| ascending, +x before -x on ties. Starts at
/// x = 0 and ends at x = 1/2.
inline std::vector<std::size_t> symmetric_order(GridSpec grid) {
  const int h = grid.half();
  std::vector<std::size_t> order;
  order.reserve(grid.size());
  order.push_back(grid.index(0));
  for (int k = 1; k < h; ++k) {
    order.push_back(grid.index(k));
    order.push_back(grid.index(-k));
  }
  order.push_back(grid.index(h));
  return order;
}

/// Largest value at x = 0, smallest at x = 1/2, placed along symmetric_order.
/// The output is a permutation of the input values.
inline CircleFunction rearrange(const CircleFunction& f) {
  std::vector<double> sorted = f.values;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  CircleFunction out(f.grid);
  const auto order = symmetric_order(f.grid);
  for (std::size_t r = 0; r < order.size(); ++r) out.values[order[r]] = sorted[r];
  return out;
}

inline bool is_symmetric_nonincreasing(const CircleFunction& f, double tol) {
  return l2_distance(f, rearrange(f)) <= tol;
}

/// Largest gap between consecutive sorted values; bounds the L2 distance
/// between a rearranged function and its mirror image.
inline double max_sorted_gap(const CircleFunction& f) {
  std::vector<double> v = f.values;
  std::sort(v.begin(), v.end());
  double gap = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) gap = std::max(gap, v[i] - v[i - 1]);
  return gap;
}

namespace detail {

// Total decrease (first) and increase (second) of sqrt(2) cos(2 pi m y) on
// [0, x], x in [0, 1/2]. The extrema sit at y = l / (2m).
inline std::pair<double, double> cosine_variation(int m, double x) {
  const auto e = [m](double y) { return std::numbers::sqrt2 * std::cos(kTwoPi * m * y); };
  double down = 0.0;
  double up = 0.0;
  const double piece = 1.0 / (2.0 * m);
  int l = 0;
  for (; (l + 1) * piece <= x; ++l) {
    // full half-period from (-1)^l to (-1)^(l+1), amplitude sqrt(2)
    if (l % 2 == 0) {
      down += 2.0 * std::numbers::sqrt2;
    } else {
      up += 2.0 * std::numbers::sqrt2;
    }
  }
  const double a = l * piece;
  if (x > a) {
    const double d = e(a) - e(x);
    if (l % 2 == 0) {
      down += d;
    } else {
      up -= d;
    }
  }
  return {down, up};
}

}  // namespace detail

/// Splits e_m into two symmetric non-increasing parts with e_m = plus - minus:
///   plus(x)  = e_m(0) - (decrease of e_m on [0, |x|])
///   minus(x) = -(increase of e_m on [0, |x|])
inline std::pair<CircleFunction, CircleFunction> split_mode(int m, GridSpec grid) {
  require(m >= 0 && m <= grid.half() - 1, "split_mode index out of range");
  if (m == 0) return {constant(grid, 1.0), constant(grid, 0.0)};
  const double e0 = std::numbers::sqrt2;
  CircleFunction plus(grid);
  CircleFunction minus(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto [down, up] = detail::cosine_variation(m, std::abs(grid.point(i)));
    plus.values[i] = e0 - down;
    minus.values[i] = -up;
  }
  return {std::move(plus), std::move(minus)};
}

}  // namespace rshe
