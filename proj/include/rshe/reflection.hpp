// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reflection process eta reconstructed from the rearrangement corrections
// Delta eta_k = X_{k+1} - Z_{k+1}, Stieltjes sums against it, and the
// energy balance of the scheme.
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rshe/grid.hpp"
#include "rshe/heat.hpp"
#include "rshe/noise.hpp"
#include "rshe/rearrange.hpp"
#include "rshe/scheme.hpp"

namespace rshe {

inline constexpr int kDefaultPairCutoff = 16;

struct ReflectionPath {
  std::vector<double> times;
  /// increments[r] = eta(times[r + 1]) - eta(times[r]).
  std::vector<CircleFunction> increments;
  /// Mean of X_{k+1} minus mean of Z_{k+1}, both summed in sorted order.
  /// Rearrangement permutes values, so every entry is exactly zero.
  std::vector<double> mass_defect;
  int pair_cutoff = 0;
  /// plus[m][r] = <eta(times[r]), e_m^+>, likewise minus; plus[m][0] = 0.
  std::vector<std::vector<double>> plus;
  std::vector<std::vector<double>> minus;
};

inline ReflectionPath eta_from_trajectory(const Trajectory& traj,
                                          int pair_cutoff = kDefaultPairCutoff) {
  require(traj.has_pre_states(), "eta_from_trajectory: trajectory carries no pre_states");
  const GridSpec grid = traj.states.front().grid;
  ReflectionPath path;
  path.times = traj.times;
  path.pair_cutoff = std::min(pair_cutoff, grid.half() - 1);
  const std::size_t intervals = traj.records() - 1;
  path.increments.reserve(intervals);
  path.mass_defect.reserve(intervals);
  for (std::size_t r = 0; r < intervals; ++r) {
    path.increments.push_back(traj.states[r + 1] - traj.pre_states[r]);
    path.mass_defect.push_back(permutation_invariant_mean(traj.states[r + 1]) -
                               permutation_invariant_mean(traj.pre_states[r]));
  }
  for (int m = 0; m <= path.pair_cutoff; ++m) {
    const auto [ep, em] = split_mode(m, grid);
    std::vector<double> p(traj.records(), 0.0);
    std::vector<double> q(traj.records(), 0.0);
    for (std::size_t r = 0; r < intervals; ++r) {
      p[r + 1] = p[r] + inner(path.increments[r], ep);
      q[r + 1] = q[r] + inner(path.increments[r], em);
    }
    path.plus.push_back(std::move(p));
    path.minus.push_back(std::move(q));
  }
  return path;
}

/// Cumulative <eta(t_r), u> at the path times. Constant u pairs through the
/// exact mass defects.
inline std::vector<double> eta_pairing(const ReflectionPath& path, const CircleFunction& u) {
  std::vector<double> out(path.times.size(), 0.0);
  const bool is_constant =
      std::all_of(u.values.begin(), u.values.end(), [&](double v) { return v == u.values[0]; });
  for (std::size_t r = 0; r < path.increments.size(); ++r) {
    const double d = is_constant ? u.values[0] * path.mass_defect[r]
                                 : inner(path.increments[r], u);
    out[r + 1] = out[r] + d;
  }
  return out;
}

/// <eta(t_r), e_m> through the splitting, p_m^+ - p_m^-.
inline std::vector<double> split_pairing(const ReflectionPath& path, int m) {
  require(m >= 0 && m <= path.pair_cutoff, "split_pairing: mode beyond pair cutoff");
  const auto& p = path.plus[static_cast<std::size_t>(m)];
  const auto& q = path.minus[static_cast<std::size_t>(m)];
  std::vector<double> out(p.size());
  for (std::size_t r = 0; r < p.size(); ++r) out[r] = p[r] - q[r];
  return out;
}

/// Pairing <eta_t, e_m> against the formula through Y = X - V, for which
/// Y_{k+1} = e^{h Laplacian} Y_k + Delta eta_k holds step by step.
struct YFormulaCheck {
  std::vector<double> direct;      // cumulative <Delta eta, e_m>
  std::vector<double> left_point;  // <Y_t, e_m> + 4 pi^2 m^2 h sum_k <Y_k, e_m>
  std::vector<double> step_exact;  // same with (1 - exp(-4 pi^2 m^2 h)) in place of 4 pi^2 m^2 h
  double sup_y = 0.0;              // sup_t ||Y_t||_2
};

inline YFormulaCheck y_formula_check(const Trajectory& traj, int m) {
  require(traj.record_every == 1, "y_formula_check needs every step recorded");
  const GridSpec grid = traj.states.front().grid;
  const CircleFunction em = basis_function(grid, m);
  const double w = kTwoPi * m;
  const double rate_left = w * w * traj.h;
  const double rate_exact = -std::expm1(-w * w * traj.h);
  YFormulaCheck out;
  const std::size_t records = traj.records();
  out.direct.assign(records, 0.0);
  out.left_point.assign(records, 0.0);
  out.step_exact.assign(records, 0.0);
  double int_left = 0.0;
  double int_exact = 0.0;
  for (std::size_t r = 0; r < records; ++r) {
    const CircleFunction y = traj.states[r] - traj.companion[r];
    out.sup_y = std::max(out.sup_y, l2_norm(y));
    const double yr = inner(y, em);
    out.left_point[r] = yr + int_left;
    out.step_exact[r] = yr + int_exact;
    int_left += rate_left * yr;
    int_exact += rate_exact * yr;
    if (r + 1 < records) out.direct[r + 1] = out.direct[r] + inner(traj.reflection[r], em);
  }
  return out;
}

struct StieltjesResult {
  double riemann = 0.0;     // sum_k <e^{eps Laplacian} z_k, Delta eta_k>
  double mode_split = 0.0;  // same through e_m^+ / e_m^- pairings, m <= M_int
  /// sum_k <odd part of e^{eps Laplacian} z_k, odd part of Delta eta_k>. The
  /// cosine pairings cannot see it; it comes from the +x/-x tie-break.
  double odd_part = 0.0;
  double scale = 0.0;       // sum_k ||z_k|| ||Delta eta_k||
};

/// Left-endpoint Riemann-Stieltjes sum of e^{eps Laplacian} z against eta.
inline StieltjesResult stieltjes_integral(std::span<const CircleFunction> z,
                                          const ReflectionPath& path, double epsilon,
                                          int mode_cutoff) {
  require(z.size() == path.times.size(), "stieltjes_integral: integrand/path time grids differ");
  require(epsilon >= 0.0, "stieltjes_integral: epsilon must be nonnegative");
  require(mode_cutoff >= 0 && mode_cutoff <= path.pair_cutoff,
          "stieltjes_integral: mode cutoff exceeds the stored pairings");
  StieltjesResult out;
  for (std::size_t r = 0; r < path.increments.size(); ++r) {
    const CircleFunction zs = heat_apply(epsilon, z[r]);
    out.riemann += inner(zs, path.increments[r]);
    out.scale += l2_norm(z[r]) * l2_norm(path.increments[r]);
    out.odd_part += 0.25 * inner(zs - mirror(zs), path.increments[r] - mirror(path.increments[r]));
    const FourierCoeffs c = to_modes(zs, mode_cutoff);
    for (int m = 0; m <= mode_cutoff; ++m) {
      const auto mi = static_cast<std::size_t>(m);
      const double d_plus = path.plus[mi][r + 1] - path.plus[mi][r];
      const double d_minus = path.minus[mi][r + 1] - path.minus[mi][r];
      out.mode_split += c.cos[mi] * (d_plus - d_minus);
    }
  }
  return out;
}

struct OrthogonalityDefect {
  double left = 0.0;   // sum_k <e^{eps Laplacian} X_k, Delta eta_k>
  double right = 0.0;  // sum_k <e^{eps Laplacian} X_{k+1}, Delta eta_k>
};

inline OrthogonalityDefect orthogonality_defect(const Trajectory& traj, double epsilon) {
  OrthogonalityDefect out;
  for (std::size_t r = 0; r + 1 < traj.records(); ++r) {
    const CircleFunction& d = traj.reflection[r];
    out.left += inner(heat_apply(epsilon, traj.states[r]), d);
    out.right += inner(heat_apply(epsilon, traj.states[r + 1]), d);
  }
  return out;
}

/// Sum of squared values accumulated in sorted order (invariant under
/// permutations of the values).
inline double permutation_invariant_sq_norm(const CircleFunction& f) {
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = f.values[i] * f.values[i];
  std::sort(sq.begin(), sq.end());
  double s = 0.0;
  for (double v : sq) s += v;
  return s / static_cast<double>(sq.size());
}

/// E ||e^{eps Laplacian} W_t||^2 / t = sum_m lambda_m^2 exp(-8 pi^2 m^2 eps).
inline double smoothed_trace(const NoiseSpec& spec, double epsilon) {
  double s = 0.0;
  for (int m = spec.cutoff; m >= 0; --m) s += mode_intensity(spec, m) * heat_factor(m, 2.0 * epsilon);
  return s;
}

/// Expected int_0^h ||D e^{eps Laplacian} xi(s)||^2 ds for the stochastic
/// convolution started at zero within one step.
inline double noise_dissipation_per_step(const NoiseSpec& spec, double h, double epsilon) {
  double s = 0.0;
  for (int m = spec.cutoff; m >= 1; --m) {
    const double a = 2.0 * (kTwoPi * m) * (kTwoPi * m);
    s += mode_intensity(spec, m) * heat_factor(m, 2.0 * epsilon) * (h + std::expm1(-a * h) / a) * 0.5;
  }
  return s;
}

/// Per-path terms of the discrete energy balance
///   ||A X_t||^2 + 2 sum_k [D_k + D_noise] = ||A X_0||^2 + t tr_eps + 2 I_mid + martingale,
/// with A = e^{eps Laplacian}, D_k = int_0^h ||D e^{s Laplacian} A X_k||^2 ds and
/// I_mid = sum_k <A^2 (X_{k+1} + Z_{k+1}) / 2, Delta eta_k>, which equals
/// (||A X_{k+1}||^2 - ||A Z_{k+1}||^2) / 2 summed over steps.
struct EnergyTerms {
  double initial = 0.0;
  double final_energy = 0.0;
  double dissipation = 0.0;        // 2 sum_k D_k
  double noise_dissipation = 0.0;  // 2 N D_noise
  double noise_input = 0.0;        // t tr_eps
  double orth_mid = 0.0;
  double orth_left = 0.0;          // with A^2 X_k
  double orth_right = 0.0;         // with A^2 X_{k+1}
  double quadratic_variation = 0.0;  // sum_k ||A Delta eta_k||^2
  double step_identity_error = 0.0;  // max_k | ||X_{k+1}||^2 - ||Z_{k+1}||^2 |

  [[nodiscard]] double residual() const {
    return final_energy + dissipation + noise_dissipation - initial - noise_input - 2.0 * orth_mid;
  }
};

inline EnergyTerms energy_terms(const Trajectory& traj, const NoiseSpec& spec, double epsilon) {
  require(traj.has_pre_states() && traj.record_every == 1,
          "energy balance needs every step recorded with pre_states");
  const GridSpec grid = traj.states.front().grid;
  const int half = grid.half();
  const auto steps = traj.records() - 1;
  const double t = traj.times.back();
  EnergyTerms e;
  const auto smooth = [&](const CircleFunction& f) { return heat_apply(epsilon, f); };
  e.initial = std::pow(l2_norm(smooth(traj.states.front())), 2);
  e.final_energy = std::pow(l2_norm(smooth(traj.states.back())), 2);
  e.noise_input = t * smoothed_trace(spec, epsilon);
  e.noise_dissipation = 2.0 * static_cast<double>(steps) * noise_dissipation_per_step(spec, traj.h, epsilon);
  for (std::size_t k = 0; k < steps; ++k) {
    const FourierCoeffs ax = detail::analyze(smooth(traj.states[k]), half);
    e.dissipation += 2.0 * dirichlet_energy_integral(ax, traj.h);
    const CircleFunction& d = traj.reflection[k];
    const CircleFunction a2_next = heat_apply(2.0 * epsilon, traj.states[k + 1]);
    const CircleFunction a2_pre = heat_apply(2.0 * epsilon, traj.pre_states[k]);
    const CircleFunction a2_prev = heat_apply(2.0 * epsilon, traj.states[k]);
    e.orth_mid += 0.5 * (inner(a2_next, d) + inner(a2_pre, d));
    e.orth_left += inner(a2_prev, d);
    e.orth_right += inner(a2_next, d);
    e.quadratic_variation += std::pow(l2_norm(smooth(d)), 2);
    e.step_identity_error =
        std::max(e.step_identity_error, std::abs(permutation_invariant_sq_norm(traj.states[k + 1]) -
                                                 permutation_invariant_sq_norm(traj.pre_states[k])));
  }
  return e;
}

struct EnergyBalance {
  std::size_t paths = 0;
  double residual = 0.0;
  double standard_error = 0.0;
  EnergyTerms mean;  // ensemble means of each term
  double residual_left = 0.0;   // residual with I_left in place of I_mid
  double residual_right = 0.0;  // residual with I_right in place of I_mid
  double max_step_identity_error = 0.0;
};

inline EnergyBalance energy_balance_report(std::span<const EnergyTerms> terms) {
  require(!terms.empty(), "energy_balance_report: empty ensemble");
  EnergyBalance b;
  b.paths = terms.size();
  const double inv = 1.0 / static_cast<double>(terms.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const EnergyTerms& e : terms) {
    const double r = e.residual();
    sum += r;
    sum_sq += r * r;
    b.mean.initial += e.initial * inv;
    b.mean.final_energy += e.final_energy * inv;
    b.mean.dissipation += e.dissipation * inv;
    b.mean.noise_dissipation += e.noise_dissipation * inv;
    b.mean.noise_input += e.noise_input * inv;
    b.mean.orth_mid += e.orth_mid * inv;
    b.mean.orth_left += e.orth_left * inv;
    b.mean.orth_right += e.orth_right * inv;
    b.mean.quadratic_variation += e.quadratic_variation * inv;
    b.max_step_identity_error = std::max(b.max_step_identity_error, e.step_identity_error);
  }
  b.residual = sum * inv;
  const double var = terms.size() > 1
                         ? std::max(0.0, (sum_sq - sum * sum * inv) / static_cast<double>(terms.size() - 1))
                         : 0.0;
  b.standard_error = std::sqrt(var * inv);
  b.residual_left = b.residual + 2.0 * (b.mean.orth_mid - b.mean.orth_left);
  b.residual_right = b.residual + 2.0 * (b.mean.orth_mid - b.mean.orth_right);
  return b;
}

inline EnergyBalance energy_balance_report(std::span<const Trajectory> ensemble, const NoiseSpec& spec,
                                           double epsilon) {
  std::vector<EnergyTerms> terms;
  terms.reserve(ensemble.size());
  for (const Trajectory& t : ensemble) terms.push_back(energy_terms(t, spec, epsilon));
  return energy_balance_report(terms);
}

}  // namespace rshe
