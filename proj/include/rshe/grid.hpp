// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Uniform grids on the circle (-1/2, 1/2], sampled functions, and the real
// Fourier transforms between sample space and the orthonormal basis
//   e_0 = 1,  e_m = sqrt(2) cos(2 pi m x),  e_m^sin = sqrt(2) sin(2 pi m x).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rshe/error.hpp"

namespace rshe {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Grid of n points x_j = j/n, j = -n/2+1, ..., n/2. Storage index i maps to
/// j = i - n/2 + 1, so index n/2-1 is x = 0 and index n-1 is x = 1/2.
struct GridSpec {
  int n = 0;

  [[nodiscard]] int half() const { return n / 2; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(n); }
  /// Storage index of the grid coordinate j.
  [[nodiscard]] std::size_t index(int j) const {
    return static_cast<std::size_t>(j + n / 2 - 1);
  }
  [[nodiscard]] int coord(std::size_t i) const {
    return static_cast<int>(i) - n / 2 + 1;
  }
  [[nodiscard]] double point(std::size_t i) const {
    return static_cast<double>(coord(i)) / static_cast<double>(n);
  }
  [[nodiscard]] std::vector<double> points() const {
    std::vector<double> xs(size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = point(i);
    return xs;
  }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline GridSpec make_grid(int n) {
  require(n >= 4 && n <= (1 << 20),
          "grid.n must lie in [4, 2^20], got " + std::to_string(n));
  require(n % 2 == 0, "grid.n must be even, got " + std::to_string(n));
  return GridSpec{n};
}

struct CircleFunction {
  GridSpec grid;
  std::vector<double> values;

  CircleFunction() = default;
  explicit CircleFunction(GridSpec g) : grid(g), values(g.size(), 0.0) {}
  CircleFunction(GridSpec g, std::vector<double> v) : grid(g), values(std::move(v)) {
    require(values.size() == grid.size(), "value count does not match grid size");
  }

  [[nodiscard]] double at(int j) const { return values[grid.index(j)]; }
  double& at(int j) { return values[grid.index(j)]; }
  [[nodiscard]] std::size_t size() const { return values.size(); }

  CircleFunction& operator+=(const CircleFunction& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  CircleFunction& operator-=(const CircleFunction& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }
  CircleFunction& operator*=(double s) {
    for (double& v : values) v *= s;
    return *this;
  }
  friend CircleFunction operator+(CircleFunction a, const CircleFunction& b) { return a += b; }
  friend CircleFunction operator-(CircleFunction a, const CircleFunction& b) { return a -= b; }
  friend CircleFunction operator*(double s, CircleFunction a) { return a *= s; }
  friend bool operator==(const CircleFunction&, const CircleFunction&) = default;
};

[[nodiscard]] inline bool is_finite(const CircleFunction& f) {
  return std::all_of(f.values.begin(), f.values.end(),
                     [](double v) { return std::isfinite(v); });
}

/// Samples fn(x) at the grid points. fn is evaluated at |x| when symmetric is
/// set, which makes the result exactly even.
inline CircleFunction sample(GridSpec grid, const std::function<double(double)>& fn,
                             bool symmetric = false) {
  CircleFunction f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = grid.point(i);
    f.values[i] = fn(symmetric ? std::abs(x) : x);
  }
  return f;
}

inline CircleFunction constant(GridSpec grid, double c) {
  return CircleFunction(grid, std::vector<double>(grid.size(), c));
}

/// Mirror image x -> -x; the self-mirrored points 0 and 1/2 stay in place.
inline CircleFunction mirror(const CircleFunction& f) {
  CircleFunction out(f.grid);
  const int h = f.grid.half();
  for (int j = -h + 1; j <= h; ++j) {
    const int mj = (j == h) ? h : -j;
    out.at(j) = f.at(mj);
  }
  return out;
}

/// Mode amplitudes: cos[m] for m = 0..cutoff and sin[m] for m = 1..cutoff
/// (sin[0] is always 0).
struct FourierCoeffs {
  int cutoff = 0;
  std::vector<double> cos;
  std::vector<double> sin;

  FourierCoeffs() = default;
  explicit FourierCoeffs(int m)
      : cutoff(m), cos(static_cast<std::size_t>(m) + 1, 0.0),
        sin(static_cast<std::size_t>(m) + 1, 0.0) {}

  [[nodiscard]] bool is_symmetric() const {
    return std::all_of(sin.begin(), sin.end(), [](double b) { return b == 0.0; });
  }
};

namespace detail {

// Basis values on the half grid k = 0..n/2, pre-scaled so that analysis and
// synthesis both read the same numbers. Entries for k and -k coincide (cos)
// or are exact negatives (sin) by construction.
class SpectralBasis {
 public:
  explicit SpectralBasis(int n) : n_(n), h_(n / 2) {
    table_cos_.resize(static_cast<std::size_t>(n));
    table_sin_.resize(static_cast<std::size_t>(n));
    for (int k = 0; k <= h_; ++k) {
      double c = 0.0;
      double s = 0.0;
      // Reduce to the first octant so exact zeros/ones land where they should.
      if (k == 0) {
        c = 1.0;
      } else if (2 * k == h_) {
        s = 1.0;
      } else if (k == h_) {
        c = -1.0;
      } else {
        const double theta = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        c = std::cos(theta);
        s = std::sin(theta);
      }
      table_cos_[static_cast<std::size_t>(k)] = c;
      table_sin_[static_cast<std::size_t>(k)] = s;
      if (k > 0 && k < h_) {
        table_cos_[static_cast<std::size_t>(n - k)] = c;
        table_sin_[static_cast<std::size_t>(n - k)] = -s;
      }
    }
    if (n <= kDenseLimit) {
      const std::size_t w = static_cast<std::size_t>(h_) + 1;
      dense_cos_.resize(w * w);
      dense_sin_.resize(w * w);
      for (int m = 0; m <= h_; ++m) {
        for (int k = 0; k <= h_; ++k) {
          dense_cos_[static_cast<std::size_t>(m) * w + static_cast<std::size_t>(k)] = cos_raw(m, k) * scale(m);
          dense_sin_[static_cast<std::size_t>(m) * w + static_cast<std::size_t>(k)] =
              (m == 0 || m == h_) ? 0.0 : sin_raw(m, k) * std::numbers::sqrt2;
        }
      }
    }
  }

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] double scale(int m) const {
    return (m == 0 || m == h_) ? 1.0 : std::numbers::sqrt2;
  }
  // e_m(k/n)
  [[nodiscard]] double cos_basis(int m, int k) const {
    if (!dense_cos_.empty()) {
      return dense_cos_[static_cast<std::size_t>(m) * (static_cast<std::size_t>(h_) + 1) +
                        static_cast<std::size_t>(k)];
    }
    return cos_raw(m, k) * scale(m);
  }
  // e_m^sin(k/n), zero for m = 0 and m = n/2
  [[nodiscard]] double sin_basis(int m, int k) const {
    if (m == 0 || m == h_) return 0.0;
    if (!dense_sin_.empty()) {
      return dense_sin_[static_cast<std::size_t>(m) * (static_cast<std::size_t>(h_) + 1) +
                        static_cast<std::size_t>(k)];
    }
    return sin_raw(m, k) * std::numbers::sqrt2;
  }

  static std::shared_ptr<const SpectralBasis> get(int n) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const SpectralBasis>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const SpectralBasis>(n);
    return slot;
  }

 private:
  static constexpr int kDenseLimit = 1024;

  [[nodiscard]] std::size_t wrap(int m, int k) const {
    const auto mk = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(k);
    return static_cast<std::size_t>(mk % static_cast<std::uint64_t>(n_));
  }
  [[nodiscard]] double cos_raw(int m, int k) const { return table_cos_[wrap(m, k)]; }
  [[nodiscard]] double sin_raw(int m, int k) const { return table_sin_[wrap(m, k)]; }

  int n_;
  int h_;
  std::vector<double> table_cos_;
  std::vector<double> table_sin_;
  std::vector<double> dense_cos_;
  std::vector<double> dense_sin_;
};

// Analysis up to cutoff m_max <= n/2. Values at +x and -x are combined before
// multiplying, so even inputs give sine coefficients that are exactly zero.
inline FourierCoeffs analyze(const CircleFunction& f, int m_max) {
  const int n = f.grid.n;
  const int h = n / 2;
  const auto basis = SpectralBasis::get(n);
  std::vector<double> even(static_cast<std::size_t>(h) + 1);
  std::vector<double> odd(static_cast<std::size_t>(h) + 1, 0.0);
  even[0] = f.at(0);
  even[static_cast<std::size_t>(h)] = f.at(h);
  for (int k = 1; k < h; ++k) {
    even[static_cast<std::size_t>(k)] = f.at(k) + f.at(-k);
    odd[static_cast<std::size_t>(k)] = f.at(k) - f.at(-k);
  }
  FourierCoeffs c(m_max);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int m = 0; m <= m_max; ++m) {
    double a = 0.0;
    for (int k = 0; k <= h; ++k) a += even[static_cast<std::size_t>(k)] * basis->cos_basis(m, k);
    c.cos[static_cast<std::size_t>(m)] = a * inv_n;
    if (m > 0 && m < h) {
      double b = 0.0;
      for (int k = 1; k < h; ++k) b += odd[static_cast<std::size_t>(k)] * basis->sin_basis(m, k);
      c.sin[static_cast<std::size_t>(m)] = b * inv_n;
    }
  }
  return c;
}

inline CircleFunction synthesize(const FourierCoeffs& c, GridSpec grid) {
  const int h = grid.half();
  const auto basis = SpectralBasis::get(grid.n);
  CircleFunction f(grid);
  const bool has_sin = !c.is_symmetric();
  for (int k = 0; k <= h; ++k) {
    double even = 0.0;
    double odd = 0.0;
    for (int m = 0; m <= c.cutoff; ++m) {
      even += c.cos[static_cast<std::size_t>(m)] * basis->cos_basis(m, k);
      if (has_sin) odd += c.sin[static_cast<std::size_t>(m)] * basis->sin_basis(m, k);
    }
    if (k == 0 || k == h) {
      f.at(k) = even;
    } else {
      f.at(k) = even + odd;
      f.at(-k) = even - odd;
    }
  }
  return f;
}

}  // namespace detail

/// Modes of f up to cutoff M (M <= n/2 - 1) by the uniform quadrature rule.
inline FourierCoeffs to_modes(const CircleFunction& f, int cutoff) {
  require(cutoff >= 0 && cutoff <= f.grid.half() - 1,
          "modes.cutoff must lie in [0, n/2 - 1], got " + std::to_string(cutoff));
  return detail::analyze(f, cutoff);
}

inline CircleFunction from_modes(const FourierCoeffs& c, GridSpec grid) {
  require(c.cutoff >= 0 && c.cutoff <= grid.half() - 1,
          "modes.cutoff must lie in [0, n/2 - 1], got " + std::to_string(c.cutoff));
  return detail::synthesize(c, grid);
}

/// e_m sampled on the grid (cosine basis function, e_0 = 1).
inline CircleFunction basis_function(GridSpec grid, int m) {
  FourierCoeffs c(m);
  c.cos[static_cast<std::size_t>(m)] = 1.0;
  return detail::synthesize(c, grid);
}

inline double inner(const CircleFunction& f, const CircleFunction& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.values[i] * g.values[i];
  return s / static_cast<double>(f.size());
}

/// Grid mean summed in sorted order, so any permutation of the values gives a
/// bit-identical result.
inline double permutation_invariant_mean(const CircleFunction& f) {
  std::vector<double> v = f.values;
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double lp_norm(const CircleFunction& f, double p) {
  require(p >= 1.0, "lp_norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  if (p == 2.0) {
    for (double v : f.values) s += v * v;
    return std::sqrt(s / static_cast<double>(f.size()));
  }
  for (double v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(s / static_cast<double>(f.size()), 1.0 / p);
}

inline double l2_norm(const CircleFunction& f) { return lp_norm(f, 2.0); }

inline double l2_distance(const CircleFunction& f, const CircleFunction& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f.values[i] - g.values[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(f.size()));
}

/// ||f||_{2,mu}^2 = sum_m (m v 1)^{2 mu} a_m^2 over the stored cosine modes.
inline double sobolev_norm(const FourierCoeffs& c, double mu) {
  double s = 0.0;
  for (int m = 0; m <= c.cutoff; ++m) {
    const double w = std::pow(static_cast<double>(std::max(m, 1)), 2.0 * mu);
    const double a = c.cos[static_cast<std::size_t>(m)];
    s += w * a * a;
  }
  return std::sqrt(s);
}

/// Spectral derivative; the Nyquist mode has no odd partner and is dropped.
inline CircleFunction derivative(const CircleFunction& f) {
  const int h = f.grid.half();
  const FourierCoeffs c = detail::analyze(f, h);
  FourierCoeffs d(h);
  for (int m = 1; m < h; ++m) {
    const double w = kTwoPi * m;
    d.sin[static_cast<std::size_t>(m)] = -w * c.cos[static_cast<std::size_t>(m)];
    d.cos[static_cast<std::size_t>(m)] = w * c.sin[static_cast<std::size_t>(m)];
  }
  return detail::synthesize(d, f.grid);
}

}  // namespace rshe
