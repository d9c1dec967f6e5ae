// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo summaries, least-squares lines and a deterministic parallel map.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "rshe/error.hpp"

namespace rshe {

struct Estimate {
  std::size_t count = 0;
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
};

inline Estimate estimate(std::span<const double> v) {
  Estimate e;
  e.count = v.size();
  if (v.empty()) return e;
  double s = 0.0;
  for (double x : v) s += x;
  e.mean = s / static_cast<double>(v.size());
  if (v.size() < 2) return e;
  double q = 0.0;
  for (double x : v) q += (x - e.mean) * (x - e.mean);
  e.se = std::sqrt(q / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return e;
}

struct Spread {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

inline Spread spread(std::vector<double> v) {
  require(!v.empty(), "spread: empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  const double med = v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
  return {v.front(), med, v.back()};
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double ci_low = 0.0;   // 95% interval for the slope
  double ci_high = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = a + b x with a Student-t interval on b.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "fit_line: x and y differ in length");
  require(x.size() >= 2, "fit_line: need at least two points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "fit_line: x values are all equal");
  LinearFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
    const boost::math::students_t dist(n - 2.0);
    const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
    f.ci_low = f.slope - q * f.slope_se;
    f.ci_high = f.slope + q * f.slope_se;
  } else {
    f.ci_low = f.ci_high = f.slope;
  }
  return f;
}

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

/// out[i] = fn(i) for i < count, computed on up to `threads` workers. Each
/// result depends on its index only, so the output is thread-count independent.
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(count);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace rshe
