// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Symmetric non-increasing functions on the circle as probability measures
// on the line: f -> Leb o f^{-1}, with quantile function u -> f((1 - u)/2).
// L2 distance of rearranged functions is the Wasserstein-2 distance.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "rshe/grid.hpp"
#include "rshe/random.hpp"
#include "rshe/rearrange.hpp"

namespace rshe {

/// Quantiles at u_i = 2i/n, i = 0..n/2, i.e. at the levels whose circle
/// preimage (1 - u_i)/2 is the grid point 1/2 - i/n.
struct QuantileFn {
  std::vector<double> u;
  std::vector<double> q;

  [[nodiscard]] std::size_t size() const { return q.size(); }
  /// Circle grid size this quantile grid belongs to.
  [[nodiscard]] int grid_n() const { return 2 * (static_cast<int>(q.size()) - 1); }
};

inline void check_nondecreasing(const std::vector<double>& q) {
  double scale = 1.0;
  for (double v : q) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 1; i < q.size(); ++i) {
    require(q[i] >= q[i - 1] - 1e-12 * scale, "quantile values must be non-decreasing");
  }
}

inline QuantileFn ustar_to_quantile(const CircleFunction& f) {
  require(is_symmetric_nonincreasing(f, 1e-9 * std::max(1.0, l2_norm(f))),
          "ustar_to_quantile: function is not symmetric non-increasing");
  const int h = f.grid.half();
  QuantileFn out;
  out.u.resize(static_cast<std::size_t>(h) + 1);
  out.q.resize(static_cast<std::size_t>(h) + 1);
  for (int i = 0; i <= h; ++i) {
    out.u[static_cast<std::size_t>(i)] = 2.0 * i / f.grid.n;
    out.q[static_cast<std::size_t>(i)] = f.at(h - i);
  }
  check_nondecreasing(out.q);
  return out;
}

inline CircleFunction quantile_to_ustar(const QuantileFn& q) {
  require(q.size() >= 3, "quantile grid too small");
  check_nondecreasing(q.q);
  const GridSpec grid = make_grid(q.grid_n());
  const int h = grid.half();
  CircleFunction f(grid);
  for (int k = 0; k <= h; ++k) {
    const double v = q.q[static_cast<std::size_t>(h - k)];
    f.at(k) = v;
    if (k > 0 && k < h) f.at(-k) = v;
  }
  return f;
}

/// Trapezoid-weighted L2 distance on the quantile grid; for quantiles read
/// off even functions it equals the circle L2 distance.
inline double quantile_distance(const QuantileFn& a, const QuantileFn& b) {
  require(a.size() == b.size(), "quantile grids differ");
  const double n = a.grid_n();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.q[i] - b.q[i];
    const double w = (i == 0 || i + 1 == a.size()) ? 1.0 / n : 2.0 / n;
    s += w * d * d;
  }
  return std::sqrt(s);
}

struct W2Result {
  double distance = 0.0;
  bool rearranged = false;  // an input was not monotone and was rearranged
};

inline W2Result w2_report(const CircleFunction& f, const CircleFunction& g) {
  require(f.grid == g.grid, "w2: grids differ");
  W2Result r;
  const bool f_ok = is_symmetric_nonincreasing(f, 0.0);
  const bool g_ok = is_symmetric_nonincreasing(g, 0.0);
  r.rearranged = !(f_ok && g_ok);
  r.distance = l2_distance(f_ok ? f : rearrange(f), g_ok ? g : rearrange(g));
  return r;
}

inline double w2(const CircleFunction& f, const CircleFunction& g) { return w2_report(f, g).distance; }

/// W2 between uniform empirical measures with equally many atoms, by the
/// sorted (monotone) coupling.
inline double w2_oracle(std::vector<double> atoms_a, std::vector<double> atoms_b) {
  require(atoms_a.size() == atoms_b.size() && !atoms_a.empty(), "w2_oracle: atom counts differ");
  std::sort(atoms_a.begin(), atoms_a.end());
  std::sort(atoms_b.begin(), atoms_b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < atoms_a.size(); ++i) {
    const double d = atoms_a[i] - atoms_b[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(atoms_a.size()));
}

/// Probability level represented by quantile index i: the cell midpoint.
/// Interior levels coincide with u_i; the two end cells are half as wide.
inline double representative_level(int i, int n) {
  const int h = n / 2;
  if (i == 0) return 0.5 / n;
  if (i == h) return 1.0 - 0.5 / n;
  return 2.0 * i / n;
}

/// Nearest-rank empirical quantiles at the representative levels, mapped
/// onto the circle.
inline CircleFunction empirical_to_ustar(std::vector<double> samples, GridSpec grid) {
  require(!samples.empty(), "empirical_to_ustar: no samples");
  for (double v : samples) require(std::isfinite(v), "empirical_to_ustar: non-finite sample");
  std::sort(samples.begin(), samples.end());
  const int h = grid.half();
  const auto count = static_cast<double>(samples.size());
  QuantileFn q;
  q.u.resize(static_cast<std::size_t>(h) + 1);
  q.q.resize(static_cast<std::size_t>(h) + 1);
  for (int i = 0; i <= h; ++i) {
    const double level = representative_level(i, grid.n);
    const auto rank = static_cast<std::size_t>(
        std::clamp(std::ceil(level * count), 1.0, count));
    q.u[static_cast<std::size_t>(i)] = 2.0 * i / grid.n;
    q.q[static_cast<std::size_t>(i)] = samples[rank - 1];
  }
  return quantile_to_ustar(q);
}

/// i.i.d. draws from Leb o f^{-1}: a uniformly chosen grid value.
inline std::vector<double> sample_measure(const CircleFunction& f, std::size_t count, RngStream& stream) {
  std::vector<double> out(count);
  const auto n = static_cast<double>(f.size());
  for (double& v : out) {
    const auto i = std::min(static_cast<std::size_t>(stream.uniform() * n), f.size() - 1);
    v = f.values[i];
  }
  return out;
}

inline std::vector<double> read_samples(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line.substr(first), &used);
    } catch (const std::exception&) {
      throw ConfigError("sample file line " + std::to_string(line_no) + ": not a number");
    }
    require(line.find_first_not_of(" \t\r", first + used) == std::string::npos,
            "sample file line " + std::to_string(line_no) + ": trailing characters");
    out.push_back(v);
  }
  return out;
}

inline std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open sample file " + path);
  return read_samples(in);
}

inline void write_samples(std::ostream& out, const std::vector<double>& samples) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  for (double v : samples) buf << v << '\n';
  out << buf.str();
}

}  // namespace rshe
