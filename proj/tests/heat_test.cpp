// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
#include "rshe/heat.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "rshe/rearrange.hpp"
#include "test_util.hpp"

namespace rshe {
namespace {

TEST(HeatApply, IdentityAtZeroAndConstants) {
  auto rng = testing::test_stream(20);
  const GridSpec g = make_grid(32);
  const CircleFunction f = testing::random_function(g, rng);
  EXPECT_EQ(heat_apply(0.0, f), f);
  for (double v : heat_apply(0.7, constant(g, 1.5)).values) EXPECT_NEAR(v, 1.5, 1e-14);
  EXPECT_THROW(heat_apply(-1e-3, f), ConfigError);
}

TEST(HeatApply, FirstModeAgainstKernelConvolution) {
  const GridSpec g = make_grid(64);
  const CircleFunction e1 = basis_function(g, 1);
  const CircleFunction spectral = heat_apply(0.1, e1);
  const double decay = std::exp(-4.0 * M_PI * M_PI * 0.1);
  EXPECT_LE(l2_distance(spectral, decay * e1), 1e-14);
  const CircleFunction conv = testing::circular_convolution(heat_kernel(0.1, g), e1);
  EXPECT_LE(lp_norm(conv - spectral, INFINITY), 1e-8);
}

TEST(HeatApply, SemigroupAndContractionProperty) {
  auto rng = testing::test_stream(21);
  for (int t = 0; t < 100; ++t) {
    const GridSpec g = make_grid(2 * (2 + static_cast<int>(rng.next_u32() % 63)));
    const CircleFunction f = testing::random_function(g, rng);
    const double s = 0.05 * rng.uniform();
    const double u = 0.05 * rng.uniform();
    const CircleFunction a = heat_apply(s, heat_apply(u, f));
    const CircleFunction b = heat_apply(s + u, f);
    EXPECT_LE(l2_distance(a, b), 1e-12 * (1.0 + l2_norm(f)));
    EXPECT_LE(l2_norm(b), l2_norm(f) * (1 + 1e-14));
    EXPECT_NEAR(to_modes(b, 0).cos[0], to_modes(f, 0).cos[0], 1e-14 * (1 + l2_norm(f)));
  }
}

TEST(HeatApply, PreservesMonotoneFunctions) {
  auto rng = testing::test_stream(22);
  for (int t = 0; t < 100; ++t) {
    const GridSpec g = make_grid(64);
    CircleFunction f = testing::random_monotone(g, rng);
    f = 0.5 * (f + mirror(f));  // exactly even and still monotone
    // the grid operator keeps the Nyquist multiplier exp(-pi^2 n^2 t) below
    // 1e-15 here, so it acts as a positive kernel
    const double time = std::pow(10.0, -3.0 + 2.0 * rng.uniform());
    EXPECT_TRUE(is_symmetric_nonincreasing(heat_apply(time, f), 1e-8));
  }
}

TEST(HeatKernel, MassMonotoneAndRejectsBadTime) {
  for (double t : {0.005, 0.02, 0.05, 0.3, 1.0}) {
    const GridSpec g = make_grid(128);
    const CircleFunction k = heat_kernel(t, g);
    double mean = 0.0;
    for (double v : k.values) {
      EXPECT_GE(v, 0.0);
      mean += v;
    }
    EXPECT_NEAR(mean / g.n, 1.0, 1e-10) << "t=" << t;
    EXPECT_TRUE(is_symmetric_nonincreasing(k, 1e-10));
  }
  EXPECT_THROW(heat_kernel(0.0, make_grid(8)), ConfigError);
  EXPECT_THROW(heat_kernel(0.1, make_grid(8), 2), ConfigError);
}

// Closed form against composite Simpson quadrature of ||D e^{s Laplacian} e_1||^2.
TEST(DirichletEnergyIntegral, FirstModeAgainstQuadrature) {
  const GridSpec g = make_grid(32);
  const CircleFunction e1 = basis_function(g, 1);
  for (double h : {1e-4, 1e-3, 1e-2, 1e-1}) {
    const int pieces = 2000;
    const double ds = h / pieces;
    double q = 0.0;
    for (int i = 0; i <= pieces; ++i) {
      const double s = i * ds;
      const double w = (i == 0 || i == pieces) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      q += w * std::pow(l2_norm(derivative(heat_apply(s, e1))), 2);
    }
    q *= ds / 3.0;
    const double closed = dirichlet_energy_integral(to_modes(e1, 15), h);
    EXPECT_NEAR(closed, (1.0 - std::exp(-8.0 * M_PI * M_PI * h)) / 2.0, 1e-14);
    EXPECT_NEAR(closed, q, 1e-10);
  }
}

TEST(DirichletEnergyIntegral, ConstantAndLargeTimeLimit) {
  FourierCoeffs c(6);
  c.cos[0] = 5.0;
  EXPECT_EQ(dirichlet_energy_integral(c, 0.3), 0.0);
  c.cos[2] = 0.5;
  c.cos[5] = -2.0;
  EXPECT_NEAR(dirichlet_energy_integral(c, 50.0), (0.25 + 4.0) / 2.0, 1e-15);
  EXPECT_THROW(dirichlet_energy_integral(c, 0.0), ConfigError);
}

}  // namespace
}  // namespace rshe
