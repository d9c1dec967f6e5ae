// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Randomised invariant suites for the rearrangement, heat and noise layers.
// Each suite counts violations of an inequality or identity over many random
// inputs and reports them as verdicts.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rshe/grid.hpp"
#include "rshe/heat.hpp"
#include "rshe/noise.hpp"
#include "rshe/random.hpp"
#include "rshe/rearrange.hpp"
#include "rshe/report.hpp"
#include "rshe/stats.hpp"

namespace rshe {

namespace detail {

/// Mix of i.i.d. Gaussian values, small-integer values (ties) and smooth
/// band-limited functions.
inline CircleFunction random_test_function(GridSpec grid, RngStream& rng) {
  CircleFunction f(grid);
  switch (rng.next_u32() % 3) {
    case 0:
      for (double& v : f.values) v = rng.normal();
      break;
    case 1:
      for (double& v : f.values) v = std::floor(5.0 * rng.uniform());
      break;
    default: {
      const int cutoff = std::min(8, grid.half() - 1);
      FourierCoeffs c(cutoff);
      for (int m = 0; m <= cutoff; ++m) {
        c.cos[static_cast<std::size_t>(m)] = rng.normal() / (1.0 + m);
        if (m > 0) c.sin[static_cast<std::size_t>(m)] = rng.normal() / (1.0 + m);
      }
      f = from_modes(c, grid);
    }
  }
  return f;
}

inline std::vector<double> sorted_values(const CircleFunction& f) {
  std::vector<double> v = f.values;
  std::sort(v.begin(), v.end());
  return v;
}

/// (1/n^2) sum_i sum_j f(x_i) g(x_i - x_j) h(x_j).
inline double riesz_functional(const CircleFunction& f, const CircleFunction& g, const CircleFunction& h) {
  const GridSpec grid = f.grid;
  const int n = grid.n;
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double inner_sum = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      int d = grid.coord(i) - grid.coord(j);
      if (d <= -n / 2) d += n;
      if (d > n / 2) d -= n;
      inner_sum += g.at(d) * h.values[j];
    }
    s += f.values[i] * inner_sum;
  }
  return s / (static_cast<double>(n) * n);
}

/// Forward difference quotient n (f(x + 1/n) - f(x)), periodic.
inline CircleFunction forward_difference(const CircleFunction& f) {
  CircleFunction d(f.grid);
  const int h = f.grid.half();
  for (int j = -h + 1; j <= h; ++j) {
    const int next = j == h ? -h + 1 : j + 1;
    d.at(j) = f.grid.n * (f.at(next) - f.at(j));
  }
  return d;
}

inline CircleFunction grid_convolution(const CircleFunction& kernel, const CircleFunction& f) {
  const GridSpec grid = f.grid;
  const int n = grid.n;
  CircleFunction out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      int d = grid.coord(i) - grid.coord(j);
      if (d <= -n / 2) d += n;
      if (d > n / 2) d -= n;
      s += kernel.at(d) * f.values[j];
    }
    out.values[i] = s / n;
  }
  return out;
}

inline RngStream suite_stream(std::uint64_t seed, std::uint64_t id, std::uint32_t salt) {
  return RngStream(seed, id, salt, StreamPurpose::kProperty);
}

}  // namespace detail

/// Multiset preservation, L^p equality, idempotence, Hardy-Littlewood and
/// non-expansion, on `cases` random pairs per grid size.
inline ExperimentReport rearrangement_suite(std::span<const int> sizes, int cases, std::uint64_t seed) {
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "rearrangement";
  r.config = {{"sizes", std::vector<int>(sizes.begin(), sizes.end())}, {"cases", cases}, {"seed", seed}};
  r.columns = {"n", "cases", "multiset_violations", "lp_max_rel_error", "idempotence_violations",
               "hardy_littlewood_violations", "nonexpansion_violations"};
  const double inf = std::numeric_limits<double>::infinity();
  const double tol = 1e-12;
  double worst_lp = 0.0;
  long total_multiset = 0, total_idem = 0, total_hl = 0, total_nonexp = 0;
  for (int n : sizes) {
    const GridSpec grid = make_grid(n);
    long multiset = 0, idem = 0, hl = 0, nonexp = 0;
    double lp_err = 0.0;
    for (int c = 0; c < cases; ++c) {
      RngStream rng = detail::suite_stream(seed, static_cast<std::uint64_t>(n), static_cast<std::uint32_t>(c));
      const CircleFunction f = detail::random_test_function(grid, rng);
      const CircleFunction g = detail::random_test_function(grid, rng);
      const CircleFunction fs = rearrange(f);
      const CircleFunction gs = rearrange(g);
      if (detail::sorted_values(fs) != detail::sorted_values(f)) ++multiset;
      if (rearrange(fs) != fs) ++idem;
      for (double p : {1.0, 2.0, 4.0, inf}) {
        const double a = lp_norm(f, p);
        if (a > 0.0) lp_err = std::max(lp_err, std::abs(lp_norm(fs, p) - a) / a);
        const double before = lp_norm(f - g, p);
        if (lp_norm(fs - gs, p) > before + tol * std::max(before, 1e-300)) ++nonexp;
      }
      if (inner(f, g) > inner(fs, gs) + tol * l2_norm(f) * l2_norm(g)) ++hl;
    }
    worst_lp = std::max(worst_lp, lp_err);
    total_multiset += multiset;
    total_idem += idem;
    total_hl += hl;
    total_nonexp += nonexp;
    r.add_row({static_cast<double>(n), static_cast<double>(cases), static_cast<double>(multiset), lp_err,
               static_cast<double>(idem), static_cast<double>(hl), static_cast<double>(nonexp)});
  }
  r.check("multiset preserved", total_multiset == 0, static_cast<double>(total_multiset), 0);
  r.check("L^p norms equal (relative)", worst_lp <= tol, worst_lp, tol);
  r.check("idempotent", total_idem == 0, static_cast<double>(total_idem), 0);
  r.check("Hardy-Littlewood", total_hl == 0, static_cast<double>(total_hl), 0, "violations beyond 1e-12 |f||g|");
  r.check("non-expansion p in {1,2,4,inf}", total_nonexp == 0, static_cast<double>(total_nonexp), 0,
          "violations beyond 1e-12 relative");
  return r;
}

/// Riesz with g a sampled heat kernel (slack 10 Lip(g)/n |f| |h|) and
/// Polya-Szego for forward differences (slack 10/n relative), p in {1, 2, 4}.
inline ExperimentReport riesz_polya_suite(std::span<const int> sizes, int triples, std::uint64_t seed) {
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "riesz_polya_szego";
  r.config = {{"sizes", std::vector<int>(sizes.begin(), sizes.end())}, {"triples", triples}, {"seed", seed}};
  r.columns = {"n", "triples", "riesz_violations", "riesz_max_excess_over_slack", "polya_szego_violations",
               "polya_szego_max_ratio"};
  long riesz_total = 0, ps_total = 0;
  for (int n : sizes) {
    const GridSpec grid = make_grid(n);
    long riesz = 0, ps = 0;
    double riesz_excess = -INFINITY, ps_ratio = 0.0;
    for (int c = 0; c < triples; ++c) {
      RngStream rng = detail::suite_stream(seed, 1000000u + static_cast<std::uint64_t>(n), static_cast<std::uint32_t>(c));
      const CircleFunction f = detail::random_test_function(grid, rng);
      const CircleFunction h = detail::random_test_function(grid, rng);
      const double t = std::pow(10.0, -2.5 + 1.5 * rng.uniform());
      const CircleFunction g = heat_kernel(t, grid);
      double lip = 0.0;
      for (double v : detail::forward_difference(g).values) lip = std::max(lip, std::abs(v));
      const double slack = 10.0 * lip / n * l2_norm(f) * l2_norm(h);
      const double gap = detail::riesz_functional(f, g, h) - detail::riesz_functional(rearrange(f), g, rearrange(h));
      riesz_excess = std::max(riesz_excess, gap - slack);
      if (gap > slack) ++riesz;
      const CircleFunction df = detail::forward_difference(f);
      const CircleFunction dfs = detail::forward_difference(rearrange(f));
      for (double p : {1.0, 2.0, 4.0}) {
        const double before = lp_norm(df, p);
        const double after = lp_norm(dfs, p);
        if (before > 0.0) ps_ratio = std::max(ps_ratio, after / before);
        if (after > before * (1.0 + 10.0 / n)) ++ps;
      }
    }
    riesz_total += riesz;
    ps_total += ps;
    r.add_row({static_cast<double>(n), static_cast<double>(triples), static_cast<double>(riesz), riesz_excess,
               static_cast<double>(ps), ps_ratio});
  }
  r.check("Riesz within 10 Lip(g)/n slack", riesz_total == 0, static_cast<double>(riesz_total), 0);
  r.check("Polya-Szego within 10/n slack", ps_total == 0, static_cast<double>(ps_total), 0);
  return r;
}

/// Dirichlet energy integral does not increase under rearrangement; f is
/// normalised to unit L2 norm, h log-uniform in [1e-4, 1e-1].
inline ExperimentReport key_inequality_suite(int n, int cases, std::uint64_t seed) {
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "key_inequality";
  r.config = {{"n", n}, {"cases", cases}, {"seed", seed}};
  r.columns = {"case", "h", "energy_before", "energy_after"};
  const GridSpec grid = make_grid(n);
  const double slack = 1e-10 + 10.0 / n;
  long violations = 0;
  double worst = -INFINITY;
  for (int c = 0; c < cases; ++c) {
    RngStream rng = detail::suite_stream(seed, 2000000u + static_cast<std::uint64_t>(n), static_cast<std::uint32_t>(c));
    CircleFunction f = detail::random_test_function(grid, rng);
    const double norm = l2_norm(f);
    if (norm > 0.0) f *= 1.0 / norm;
    const double h = std::pow(10.0, -4.0 + 3.0 * rng.uniform());
    const double before = dirichlet_energy_integral(detail::analyze(f, grid.half()), h);
    const double after = dirichlet_energy_integral(detail::analyze(rearrange(f), grid.half()), h);
    worst = std::max(worst, after - before);
    if (after - before > slack) ++violations;
    r.add_row({static_cast<double>(c), h, before, after});
  }
  r.summary["max_increase"] = json_number(worst);
  r.check("energy(rearranged) <= energy + 1e-10 + 10/n", violations == 0, static_cast<double>(violations), 0,
          "max increase " + format_double(worst));
  return r;
}

/// Spectral heat vs kernel convolution, kernel mass and monotonicity, and
/// preservation of monotone functions.
inline ExperimentReport heat_suite(std::uint64_t seed, int cases = 200) {
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "heat";
  r.config = {{"seed", seed}, {"cases", cases}};
  r.columns = {"n", "t", "spectral_vs_kernel", "kernel_mass_error", "kernel_monotone_defect"};
  double worst_conv = 0.0, worst_mass = 0.0, worst_mono = 0.0;
  for (int n : {64, 128, 256}) {
    const GridSpec grid = make_grid(n);
    for (double t : {0.005, 0.01, 0.05, 0.1, 0.5}) {
      const CircleFunction k = heat_kernel(t, grid);
      double mass = 0.0;
      bool nonneg = true;
      for (double v : k.values) {
        mass += v;
        nonneg = nonneg && v >= 0.0;
      }
      const double mass_err = std::abs(mass / n - 1.0);
      const double mono = nonneg ? l2_distance(k, rearrange(k)) : INFINITY;
      RngStream rng = detail::suite_stream(seed, 3000000u + static_cast<std::uint64_t>(n),
                                           static_cast<std::uint32_t>(t * 1e6));
      FourierCoeffs c(8);
      for (int m = 0; m <= 8; ++m) {
        c.cos[static_cast<std::size_t>(m)] = rng.normal();
        if (m > 0) c.sin[static_cast<std::size_t>(m)] = rng.normal();
      }
      const CircleFunction f = from_modes(c, grid);
      const double conv = lp_norm(heat_apply(t, f) - detail::grid_convolution(k, f), INFINITY);
      worst_conv = std::max(worst_conv, conv);
      worst_mass = std::max(worst_mass, mass_err);
      worst_mono = std::max(worst_mono, mono);
      r.add_row({static_cast<double>(n), t, conv, mass_err, mono});
    }
  }
  long monotone_lost = 0;
  double worst_u2 = 0.0;
  const GridSpec grid = make_grid(64);
  for (int c = 0; c < cases; ++c) {
    RngStream rng = detail::suite_stream(seed, 3500000u, static_cast<std::uint32_t>(c));
    CircleFunction f = rearrange(detail::random_test_function(grid, rng));
    f = 0.5 * (f + mirror(f));
    // keeps exp(-pi^2 n^2 t) negligible so the grid operator is a positive kernel
    const double t = std::pow(10.0, -3.0 + 2.0 * rng.uniform());
    const CircleFunction u = heat_apply(t, f);
    const double d = l2_distance(u, rearrange(u));
    worst_u2 = std::max(worst_u2, d);
    if (d > 1e-8) ++monotone_lost;
  }
  r.check("spectral heat vs kernel convolution", worst_conv <= 1e-8, worst_conv, 1e-8);
  r.check("kernel mass 1", worst_mass <= 1e-10, worst_mass, 1e-10);
  r.check("kernel symmetric non-increasing", worst_mono <= 1e-10, worst_mono, 1e-10);
  r.check("heat preserves monotone functions", monotone_lost == 0, worst_u2, 1e-8);
  return r;
}

/// Per-mode empirical variances of the stochastic convolution against the
/// closed form, and the variance identity behind aggregate().
inline ExperimentReport noise_suite(std::uint64_t seed, int samples = 100000, int max_mode = 8,
                                    std::vector<double> lambdas = {0.6, 0.75, 0.9}, double h = 0.01) {
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "noise";
  r.config = {{"seed", seed}, {"samples", samples}, {"max_mode", max_mode}, {"lambdas", lambdas}, {"h", h}};
  r.columns = {"lambda", "mode", "closed_form", "empirical", "se", "z"};
  long outside = 0;
  double worst_z = 0.0, worst_identity = 0.0;
  for (double lambda : lambdas) {
    const NoiseSpec spec{lambda, max_mode, seed};
    std::vector<std::vector<double>> sq(static_cast<std::size_t>(max_mode) + 1);
    for (int s = 0; s < samples; ++s) {
      const ConvIncrement xi = conv_increment(spec, h, static_cast<std::uint64_t>(s), 0);
      for (int m = 0; m <= max_mode; ++m) sq[static_cast<std::size_t>(m)].push_back(xi.gauss[static_cast<std::size_t>(m)] * xi.gauss[static_cast<std::size_t>(m)]);
    }
    for (int m = 0; m <= max_mode; ++m) {
      const Estimate e = estimate(sq[static_cast<std::size_t>(m)]);
      const double v = convolution_variance(spec, m, h);
      const double z = (e.mean - v) / e.se;
      worst_z = std::max(worst_z, std::abs(z));
      if (std::abs(z) > 3.0) ++outside;
      r.add_row({lambda, static_cast<double>(m), v, e.mean, e.se, z});
      const double f = heat_factor(m, h);
      const double composed = f * f * v + v;
      const double target = convolution_variance(spec, m, 2.0 * h);
      worst_identity = std::max(worst_identity, std::abs(composed - target) / target);
    }
  }
  r.check("per-mode variance within 3 SE", outside == 0, worst_z, 3.0);
  r.check("aggregate variance identity (relative)", worst_identity <= 1e-14, worst_identity, 1e-14);
  return r;
}

}  // namespace rshe
