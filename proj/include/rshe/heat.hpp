// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Periodic heat semigroup e^{t Laplacian} on the circle (diffusivity 1).
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rshe/grid.hpp"

namespace rshe {

/// exp(-4 pi^2 m^2 t): the heat multiplier of mode m.
inline double heat_factor(int m, double t) {
  const double w = kTwoPi * m;
  return std::exp(-w * w * t);
}

/// Multiplies every cosine/sine mode (including Nyquist) by its heat factor.
inline FourierCoeffs heat_modes(FourierCoeffs c, double t) {
  for (int m = 0; m <= c.cutoff; ++m) {
    const double f = heat_factor(m, t);
    c.cos[static_cast<std::size_t>(m)] *= f;
    c.sin[static_cast<std::size_t>(m)] *= f;
  }
  return c;
}

inline CircleFunction heat_apply(double t, const CircleFunction& f) {
  require(t >= 0.0, "heat time must be nonnegative");
  if (t == 0.0) return f;
  const int h = f.grid.half();
  return detail::synthesize(heat_modes(detail::analyze(f, h), t), f.grid);
}

inline int default_kernel_images(double t, int n) {
  const double k = 3.0 + std::ceil(3.0 * std::sqrt(t) * n);
  return static_cast<int>(std::min(k, 20.0));
}

/// Wrapped Gaussian (4 pi t)^{-1/2} sum_{|k|<=K} exp(-(x-k)^2 / (4t)),
/// evaluated at |x| so the samples are exactly even.
inline CircleFunction heat_kernel(double t, GridSpec grid, int images) {
  require(t > 0.0, "heat kernel requires t > 0");
  require(images >= 3, "heat kernel needs at least 3 images per side");
  const double norm = 1.0 / std::sqrt(4.0 * std::numbers::pi * t);
  return sample(
      grid,
      [&](double x) {
        double s = 0.0;
        // smallest terms first
        for (int k = images; k >= 1; --k) {
          const double a = x - k;
          const double b = x + k;
          s += std::exp(-a * a / (4.0 * t)) + std::exp(-b * b / (4.0 * t));
        }
        s += std::exp(-x * x / (4.0 * t));
        return norm * s;
      },
      /*symmetric=*/true);
}

inline CircleFunction heat_kernel(double t, GridSpec grid) {
  return heat_kernel(t, grid, default_kernel_images(t, grid.n));
}

/// Closed form of int_0^h ||D e^{s Laplacian} u||_2^2 ds:
///   sum_{m>=1} (a_m^2 + b_m^2) (1 - exp(-8 pi^2 m^2 h)) / 2.
/// Sine amplitudes enter the same way; they vanish for even u.
inline double dirichlet_energy_integral(const FourierCoeffs& u, double h) {
  require(h > 0.0, "dirichlet_energy_integral requires h > 0");
  double s = 0.0;
  for (int m = 1; m <= u.cutoff; ++m) {
    const double w = kTwoPi * m;
    const double a = u.cos[static_cast<std::size_t>(m)];
    const double b = u.sin[static_cast<std::size_t>(m)];
    s += (a * a + b * b) * (-std::expm1(-2.0 * w * w * h)) * 0.5;
  }
  return s;
}

}  // namespace rshe
