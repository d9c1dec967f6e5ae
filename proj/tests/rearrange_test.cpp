// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
#include "rshe/rearrange.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rshe/heat.hpp"
#include "test_util.hpp"

namespace rshe {
namespace {

std::vector<double> sorted_values(const CircleFunction& f) {
  std::vector<double> v = f.values;
  std::sort(v.begin(), v.end());
  return v;
}

TEST(SymmetricOrder, StartsAtZeroEndsAtHalf) {
  const GridSpec g = make_grid(8);
  const auto order = symmetric_order(g);
  ASSERT_EQ(order.size(), 8u);
  EXPECT_EQ(order.front(), g.index(0));
  EXPECT_EQ(order[1], g.index(1));
  EXPECT_EQ(order[2], g.index(-1));
  EXPECT_EQ(order.back(), g.index(4));
}

TEST(Rearrange, SmallExampleByDefinition) {
  const GridSpec g = make_grid(4);
  // values at (-0.25, 0, 0.25, 0.5)
  const CircleFunction f(g, {1.0, 3.0, 0.0, 2.0});
  const CircleFunction r = rearrange(f);
  EXPECT_EQ(r.values, (std::vector<double>{1.0, 3.0, 2.0, 0.0}));
  EXPECT_EQ(sorted_values(r), sorted_values(f));
}

TEST(Rearrange, FixedPointsAndConstants) {
  const GridSpec g = make_grid(64);
  const CircleFunction k = heat_kernel(0.05, g);
  EXPECT_EQ(rearrange(k), k);
  EXPECT_EQ(rearrange(constant(g, 2.0)), constant(g, 2.0));
}

TEST(Rearrange, MirrorGapBound) {
  auto rng = testing::test_stream(10);
  for (int t = 0; t < 200; ++t) {
    const CircleFunction r = rearrange(testing::random_function(make_grid(32), rng));
    EXPECT_LE(l2_distance(r, mirror(r)), max_sorted_gap(r) + 1e-15);
  }
}

// Exact discrete lemmas: multiset, L^p, idempotence, Hardy-Littlewood,
// non-expansion.
TEST(Rearrange, ExactInequalitiesProperty) {
  auto rng = testing::test_stream(11);
  const double inf = std::numeric_limits<double>::infinity();
  for (int n : {4, 16, 64}) {
    const GridSpec g = make_grid(n);
    for (int t = 0; t < 500; ++t) {
      const CircleFunction f = testing::random_function(g, rng);
      const CircleFunction h = testing::random_function(g, rng);
      const CircleFunction fs = rearrange(f);
      const CircleFunction hs = rearrange(h);
      ASSERT_EQ(sorted_values(fs), sorted_values(f));
      ASSERT_EQ(rearrange(fs), fs);
      for (double p : {1.0, 2.0, 4.0, inf}) {
        EXPECT_NEAR(lp_norm(fs, p), lp_norm(f, p), 1e-12 * lp_norm(f, p));
        EXPECT_LE(lp_norm(fs - hs, p), lp_norm(f - h, p) * (1 + 1e-12) + 1e-300);
      }
      EXPECT_LE(inner(f, h), inner(fs, hs) + 1e-12 * l2_norm(f) * l2_norm(h));
    }
  }
}

TEST(IsSymmetricNonincreasing, Examples) {
  const GridSpec g = make_grid(128);
  EXPECT_TRUE(is_symmetric_nonincreasing(heat_kernel(0.02, g), 1e-9));
  EXPECT_TRUE(is_symmetric_nonincreasing(basis_function(g, 1), 1e-12));
  EXPECT_FALSE(is_symmetric_nonincreasing(basis_function(g, 2), 1e-6));
}

// Independent oracle: midpoint-rule quadrature of the splitting integrands on
// a fine sub-grid, integrated outward from 0 on each side separately.
std::pair<CircleFunction, CircleFunction> split_by_quadrature(int m, GridSpec g) {
  const int sub = 4000;
  const auto de = [m](double y) {
    return -2.0 * M_PI * m * std::sqrt(2.0) * std::sin(2.0 * M_PI * m * y);
  };
  CircleFunction plus(g);
  CircleFunction minus(g);
  plus.at(0) = std::sqrt(2.0);
  minus.at(0) = 0.0;
  const double cell = 1.0 / g.n;
  double p_pos = std::sqrt(2.0), q_pos = 0.0, p_neg = std::sqrt(2.0), q_neg = 0.0;
  for (int k = 1; k <= g.half(); ++k) {
    for (int s = 0; s < sub; ++s) {
      const double y = (k - 1) * cell + (s + 0.5) * cell / sub;
      const double dy = cell / sub;
      // x > 0: plus loses the decreasing part, minus loses the increasing part
      p_pos -= std::max(-de(y), 0.0) * dy;
      q_pos -= std::max(de(y), 0.0) * dy;
      // x < 0, integrating from 0 down to -y
      p_neg -= std::max(de(-y), 0.0) * dy;
      q_neg -= std::max(-de(-y), 0.0) * dy;
    }
    plus.at(k) = p_pos;
    minus.at(k) = q_pos;
    if (k < g.half()) {
      plus.at(-k) = p_neg;
      minus.at(-k) = q_neg;
    }
  }
  return {plus, minus};
}

TEST(SplitMode, ZeroMode) {
  const GridSpec g = make_grid(16);
  const auto [p, q] = split_mode(0, g);
  EXPECT_EQ(p, constant(g, 1.0));
  EXPECT_EQ(q, constant(g, 0.0));
}

TEST(SplitMode, MatchesQuadratureOracle) {
  for (auto [m, n] : {std::pair{1, 64}, std::pair{3, 256}, std::pair{8, 64}}) {
    const GridSpec g = make_grid(n);
    const double tol = 1e-6 * (1.0 + 2.0 * M_PI * m);
    const auto [p, q] = split_mode(m, g);
    const auto [po, qo] = split_by_quadrature(m, g);
    EXPECT_LE(l2_distance(p, po), tol) << "m=" << m;
    EXPECT_LE(l2_distance(q, qo), tol) << "m=" << m;
    EXPECT_TRUE(is_symmetric_nonincreasing(p, tol));
    EXPECT_TRUE(is_symmetric_nonincreasing(q, tol));
    EXPECT_LE(l2_distance(p - q, basis_function(g, m)), tol);
  }
}

}  // namespace
}  // namespace rshe
