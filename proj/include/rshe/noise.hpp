// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Coloured Q-Wiener noise W = sum_m lambda_m B^m e_m with lambda_0 = 1 and
// lambda_m = m^{-lambda}, sampled through the exact per-mode stochastic
// convolution over one time step.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rshe/grid.hpp"
#include "rshe/heat.hpp"
#include "rshe/random.hpp"

namespace rshe {

struct NoiseSpec {
  double lambda = 0.75;
  int cutoff = 0;
  std::uint64_t master_seed = 0;
  /// Multiplies every lambda_m; 0 switches the noise off.
  double scale = 1.0;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

inline void validate(const NoiseSpec& spec) {
  require(spec.lambda > 0.5, "noise.lambda must exceed 0.5, got " + std::to_string(spec.lambda));
  require(spec.cutoff >= 0, "modes.cutoff must be nonnegative");
  require(spec.scale >= 0.0 && std::isfinite(spec.scale), "noise.scale must be finite and >= 0");
}

/// lambda_m^2 including the scale factor.
inline double mode_intensity(const NoiseSpec& spec, int m) {
  const double base = (m == 0) ? 1.0 : std::pow(static_cast<double>(m), -2.0 * spec.lambda);
  return spec.scale * spec.scale * base;
}

/// Var of int_0^h e^{(h-s) Laplacian} dW_s paired with e_m:
///   h for m = 0, lambda_m^2 (1 - exp(-8 pi^2 m^2 h)) / (8 pi^2 m^2) otherwise.
inline double convolution_variance(const NoiseSpec& spec, int m, double h) {
  if (m == 0) return mode_intensity(spec, 0) * h;
  const double a = 2.0 * (kTwoPi * m) * (kTwoPi * m);
  return mode_intensity(spec, m) * (-std::expm1(-a * h)) / a;
}

/// Truncated trace of Q per unit time: sum_{m=0..M} lambda_m^2.
inline double trace_constant(const NoiseSpec& spec) {
  double s = 0.0;
  // small terms first
  for (int m = spec.cutoff; m >= 0; --m) s += mode_intensity(spec, m);
  return s;
}

struct ConvIncrement {
  double h = 0.0;
  double lambda = 0.0;
  double scale = 1.0;
  /// Cosine-mode amplitudes xi_m, m = 0..M.
  std::vector<double> gauss;

  [[nodiscard]] int cutoff() const { return static_cast<int>(gauss.size()) - 1; }

  [[nodiscard]] FourierCoeffs modes() const {
    FourierCoeffs c(cutoff());
    c.cos = gauss;
    return c;
  }
};

inline ConvIncrement zero_increment(const NoiseSpec& spec, double h) {
  return ConvIncrement{h, spec.lambda, spec.scale,
                       std::vector<double>(static_cast<std::size_t>(spec.cutoff) + 1, 0.0)};
}

inline ConvIncrement conv_increment(const NoiseSpec& spec, double h, RngStream& stream) {
  validate(spec);
  require(h > 0.0, "step length must be positive");
  ConvIncrement xi = zero_increment(spec, h);
  for (int m = 0; m <= spec.cutoff; ++m) {
    xi.gauss[static_cast<std::size_t>(m)] =
        std::sqrt(convolution_variance(spec, m, h)) * stream.normal();
  }
  return xi;
}

/// Increment for step `step` of trajectory `trajectory`.
inline ConvIncrement conv_increment(const NoiseSpec& spec, double h, std::uint64_t trajectory,
                                    std::uint32_t step) {
  RngStream stream(spec.master_seed, trajectory, step, StreamPurpose::kNoise);
  return conv_increment(spec, h, stream);
}

/// Exact composition of two consecutive steps of length h_fine:
///   xi_m(2 h) = exp(-4 pi^2 m^2 h) xi_a,m + xi_b,m.
inline ConvIncrement aggregate(const ConvIncrement& a, const ConvIncrement& b, double h_fine) {
  require(a.lambda == b.lambda && a.scale == b.scale && a.gauss.size() == b.gauss.size(),
          "aggregate: increments come from different noise specs");
  require(a.h == h_fine && b.h == h_fine, "aggregate: step length mismatch");
  ConvIncrement out{2.0 * h_fine, a.lambda, a.scale, std::vector<double>(a.gauss.size())};
  for (std::size_t m = 0; m < a.gauss.size(); ++m) {
    out.gauss[m] = heat_factor(static_cast<int>(m), h_fine) * a.gauss[m] + b.gauss[m];
  }
  return out;
}

}  // namespace rshe
