// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
#include "rshe/reflection.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

namespace rshe {
namespace {

SchemeConfig base_config(double T = 0.5, double h = 1e-3) {
  SchemeConfig cfg;
  cfg.grid = make_grid(64);
  cfg.noise.cutoff = 31;
  cfg.noise.lambda = 0.75;
  cfg.noise.master_seed = 21;
  cfg.h = h;
  cfg.T = T;
  return cfg;
}

CircleFunction bump(GridSpec g) {
  return sample(g, [](double x) { return std::exp(-20.0 * x * x); }, true);
}

const Trajectory& shared_path() {
  static const Trajectory traj = simulate(base_config(), bump(make_grid(64)), std::uint64_t{1});
  return traj;
}

TEST(EtaFromTrajectory, ZeroNoiseMonotoneStartHasNoReflection) {
  const SchemeConfig cfg = base_config(0.05);
  const Trajectory traj = simulate(cfg, bump(cfg.grid), ZeroNoise{cfg.noise, cfg.h});
  const ReflectionPath path = eta_from_trajectory(traj);
  for (const auto& d : path.increments) EXPECT_LE(lp_norm(d, INFINITY), 1e-12);
  const OrthogonalityDefect o = orthogonality_defect(traj, 0.0);
  EXPECT_LE(std::abs(o.left) + std::abs(o.right), 1e-20);
}

TEST(EtaFromTrajectory, OneStepFromZero) {
  const SchemeConfig cfg = base_config(1e-3);
  const Trajectory traj = simulate(cfg, constant(cfg.grid, 0.0), std::uint64_t{2});
  const ConvIncrement xi = conv_increment(cfg.noise, cfg.h, 2, 0);
  FourierCoeffs c(xi.cutoff());
  for (int m = 0; m <= xi.cutoff(); ++m) c.cos[m] = xi.gauss[m];
  const CircleFunction zeta = from_modes(c, cfg.grid);
  EXPECT_LE(l2_distance(eta_from_trajectory(traj).increments[0], rearrange(zeta) - zeta), 1e-13);
}

TEST(EtaFromTrajectory, RequiresPreStates) {
  SchemeConfig cfg = base_config(0.01);
  cfg.record_every = 2;
  const Trajectory traj = simulate(cfg, bump(cfg.grid), std::uint64_t{0});
  EXPECT_THROW(eta_from_trajectory(traj), ConfigError);
}

TEST(EtaPairing, MeanIsExactlyZero) {
  const ReflectionPath path = eta_from_trajectory(shared_path());
  for (double v : eta_pairing(path, constant(make_grid(64), 1.0))) EXPECT_EQ(v, 0.0);
  for (double v : path.mass_defect) EXPECT_EQ(v, 0.0);
}

TEST(EtaPairing, MonotoneTestFunctionsNonDecreasing) {
  const Trajectory& traj = shared_path();
  const ReflectionPath path = eta_from_trajectory(traj);
  const GridSpec g = make_grid(64);
  std::vector<CircleFunction> tests;
  for (double t : {0.002, 0.02, 0.2}) tests.push_back(heat_kernel(t, g));
  for (int m = 0; m <= 8; ++m) {
    const auto [ep, em] = split_mode(m, g);
    tests.push_back(ep);
    tests.push_back(em);
  }
  for (const CircleFunction& u : tests) {
    ASSERT_TRUE(is_symmetric_nonincreasing(u, 1e-12));
    for (const CircleFunction& d : path.increments) {
      EXPECT_GE(inner(d, u), -1e-12 * l2_norm(u) * l2_norm(d));
    }
  }
}

// Discrete Hardy-Littlewood on random monotone u, every step.
TEST(EtaPairing, RandomMonotoneProperty) {
  const ReflectionPath path = eta_from_trajectory(shared_path());
  auto rng = testing::test_stream(60);
  for (int t = 0; t < 50; ++t) {
    const CircleFunction u = testing::random_monotone(make_grid(64), rng);
    for (const CircleFunction& d : path.increments) {
      EXPECT_GE(inner(d, u), -1e-12 * l2_norm(u) * l2_norm(d));
    }
  }
}

TEST(EtaPairing, SplittingConsistency) {
  const ReflectionPath path = eta_from_trajectory(shared_path());
  const GridSpec g = make_grid(64);
  for (int m : {1, 2, 5, 16}) {
    const auto direct = eta_pairing(path, basis_function(g, m));
    const auto split = split_pairing(path, m);
    double scale = 0.0;
    for (const auto& d : path.increments) scale += l2_norm(d);
    for (std::size_t r = 0; r < direct.size(); ++r) {
      EXPECT_NEAR(direct[r], split[r], 1e-8);
      EXPECT_NEAR(direct[r], split[r], 1e-6 * scale);
    }
  }
  EXPECT_THROW(split_pairing(path, 17), ConfigError);
}

// The step-exact form is an algebraic identity. The left-endpoint form
// differs from it by sum_k (a - (1 - e^{-a})) <Y_k, e_m>, a = 4 pi^2 m^2 h,
// bounded by T * 8 pi^4 m^4 h * sup ||Y||.
TEST(YFormula, AgreesWithDirectAccumulation) {
  const Trajectory& traj = shared_path();
  for (int m : {1, 2, 4, 8, 16}) {
    const YFormulaCheck y = y_formula_check(traj, m);
    const double a = 4.0 * M_PI * M_PI * m * m * traj.h;
    const double bound = traj.times.back() / traj.h * 0.5 * a * a * y.sup_y;
    for (std::size_t r = 0; r < y.direct.size(); ++r) {
      EXPECT_NEAR(y.step_exact[r], y.direct[r], 1e-12 * (1.0 + y.sup_y)) << "m=" << m;
      EXPECT_LE(std::abs(y.left_point[r] - y.direct[r]), bound) << "m=" << m;
    }
  }
}

TEST(Stieltjes, TrivialIntegrands) {
  const Trajectory& traj = shared_path();
  const ReflectionPath path = eta_from_trajectory(traj);
  const GridSpec g = make_grid(64);
  const std::vector<CircleFunction> zero(traj.records(), constant(g, 0.0));
  EXPECT_EQ(stieltjes_integral(zero, path, 0.01, 16).riemann, 0.0);
  const std::vector<CircleFunction> ones(traj.records(), constant(g, 1.0));
  const StieltjesResult r = stieltjes_integral(ones, path, 0.01, 16);
  EXPECT_NEAR(r.riemann, 0.0, 1e-12 * r.scale);
  EXPECT_NEAR(r.mode_split, 0.0, 1e-12 * r.scale);
  EXPECT_THROW(stieltjes_integral(std::span(zero).subspan(1), path, 0.0, 16), ConfigError);
  EXPECT_THROW(stieltjes_integral(zero, path, 0.0, 17), ConfigError);
}

// The cosine pairings see the even part of Delta eta; together with the odd
// cross term they reproduce the Riemann sum once the heat factor kills
// modes past the cutoff.
TEST(Stieltjes, DualFormulaAndSign) {
  const Trajectory& traj = shared_path();
  const ReflectionPath path = eta_from_trajectory(traj);
  for (double eps : {0.001, 0.01}) {
    const StieltjesResult r = stieltjes_integral(traj.states, path, eps, 16);
    EXPECT_GE(r.riemann, -1e-10 * r.scale);
    EXPECT_NEAR(r.riemann, r.mode_split + r.odd_part, 1e-6 * r.scale) << "eps=" << eps;
    EXPECT_LE(std::abs(r.odd_part), 1e-3 * r.scale);
  }
}

TEST(Stieltjes, MonotoneIntegrandsNonnegativeProperty) {
  const Trajectory& traj = shared_path();
  const ReflectionPath path = eta_from_trajectory(traj);
  auto rng = testing::test_stream(61);
  for (int t = 0; t < 5; ++t) {
    std::vector<CircleFunction> z;
    for (std::size_t r = 0; r < traj.records(); ++r) z.push_back(testing::random_monotone(make_grid(64), rng));
    for (double eps : {0.0, 0.001, 0.01}) {
      const StieltjesResult s = stieltjes_integral(z, path, eps, 16);
      EXPECT_GE(s.riemann, -1e-10 * s.scale);
    }
  }
}

TEST(OrthogonalityDefect, RightEndpointIdentityAtZero) {
  const Trajectory& traj = shared_path();
  const OrthogonalityDefect o = orthogonality_defect(traj, 0.0);
  double half_qv = 0.0;
  for (const auto& d : traj.reflection) half_qv += 0.5 * std::pow(l2_norm(d), 2);
  EXPECT_NEAR(o.right, half_qv, 1e-12 * std::max(1.0, half_qv));
  EXPECT_GE(o.left, -1e-12);
  EXPECT_GE(orthogonality_defect(traj, 0.01).left, 0.0);
}

TEST(EnergyBalance, ZeroNoiseIsHeatIdentity) {
  const SchemeConfig cfg = base_config(0.1);
  NoiseSpec quiet = cfg.noise;
  quiet.scale = 0.0;
  const Trajectory traj = simulate(cfg, bump(cfg.grid), ZeroNoise{quiet, cfg.h});
  for (double eps : {0.0, 0.005}) {
    const EnergyTerms e = energy_terms(traj, quiet, eps);
    EXPECT_LE(std::abs(e.residual()), 1e-8) << "eps=" << eps;
    EXPECT_EQ(e.noise_input, 0.0);
  }
}

TEST(EnergyBalance, PerStepIdentityAndMidpointOrthogonality) {
  const Trajectory& traj = shared_path();
  const EnergyTerms e = energy_terms(traj, base_config().noise, 0.0);
  EXPECT_LE(e.step_identity_error, 1e-12 * e.initial);
  EXPECT_LE(std::abs(e.orth_mid), 1e-12);
  EXPECT_NEAR(e.orth_right, 0.5 * e.quadratic_variation, 1e-12);
}

TEST(EnergyBalance, SingleModeTinyNoiseWithinThreeSe) {
  SchemeConfig cfg = base_config(0.1);
  cfg.noise.scale = 0.05;
  const CircleFunction x0 = constant(cfg.grid, 1.0) + 0.3 * basis_function(cfg.grid, 1);
  std::vector<EnergyTerms> terms;
  for (std::uint64_t p = 0; p < 60; ++p) terms.push_back(energy_terms(simulate(cfg, x0, p), cfg.noise, 0.002));
  const EnergyBalance b = energy_balance_report(terms);
  EXPECT_EQ(b.paths, 60u);
  EXPECT_LE(std::abs(b.residual), 3.0 * b.standard_error + 1e-10);
  EXPECT_GT(b.standard_error, 0.0);
}

TEST(EnergyBalance, RejectsThinnedTrajectories) {
  SchemeConfig cfg = base_config(0.01);
  cfg.record_every = 2;
  const Trajectory traj = simulate(cfg, bump(cfg.grid), std::uint64_t{0});
  EXPECT_THROW(energy_terms(traj, cfg.noise, 0.0), ConfigError);
  EXPECT_THROW(energy_balance_report(std::span<const EnergyTerms>{}), ConfigError);
}

}  // namespace
}  // namespace rshe
