// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo campaigns over the scheme. Every trajectory draws its noise
// from its own counter-based stream, so results do not depend on the number
// of worker threads.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rshe/grid.hpp"
#include "rshe/heat.hpp"
#include "rshe/measure.hpp"
#include "rshe/noise.hpp"
#include "rshe/rearrange.hpp"
#include "rshe/reflection.hpp"
#include "rshe/report.hpp"
#include "rshe/scheme.hpp"
#include "rshe/stats.hpp"

namespace rshe {

struct ExperimentConfig {
  SchemeConfig scheme;
  std::size_t paths = 1000;
  unsigned threads = 1;
  /// zero | bump | two_level
  std::string initial = "bump";
};

inline CircleFunction initial_condition(const std::string& name, GridSpec grid) {
  if (name == "zero") return constant(grid, 0.0);
  if (name == "bump") return sample(grid, [](double x) { return std::exp(-20.0 * x * x); }, true);
  if (name == "two_level") return sample(grid, [](double x) { return std::abs(x) <= 0.25 ? 1.0 : 0.0; }, true);
  throw ConfigError("initial must be one of zero, bump, two_level; got " + name);
}

inline nlohmann::json config_json(const ExperimentConfig& c) {
  const SchemeConfig& s = c.scheme;
  return {{"grid.n", s.grid.n},          {"modes.cutoff", s.noise.cutoff}, {"noise.lambda", s.noise.lambda},
          {"noise.seed", s.noise.master_seed}, {"noise.scale", s.noise.scale}, {"scheme.h", s.h},
          {"scheme.T", s.T},            {"scheme.record_every", s.record_every}, {"ensemble.paths", c.paths},
          {"initial", c.initial}};
}

namespace detail {

inline void require_paths(std::size_t paths) { require(paths >= 1, "ensemble.paths must be >= 1"); }

/// Index in 0..records-1 of the recorded time closest to t.
inline std::size_t nearest_record(double t, double dt, std::size_t records) {
  const auto k = static_cast<long>(std::llround(t / dt));
  return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(records) - 1));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Flow contraction

struct ContractionOptions {
  bool identical = false;  // both runs start from the same state
  double tolerance = 1e-12;
};

/// Coupled runs from two random monotone starts per pair; d_k must be
/// non-increasing step by step.
inline ExperimentReport contraction_experiment(const ExperimentConfig& cfg, const ContractionOptions& opt = {}) {
  validate(cfg.scheme);
  detail::require_paths(cfg.paths);
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "contraction";
  r.config = config_json(cfg);
  r.config["identical"] = opt.identical;
  const SchemeConfig& s = cfg.scheme;
  const int steps = s.steps();
  const std::size_t records = static_cast<std::size_t>(steps / s.record_every) + 1;

  struct PairResult {
    long violations = 0;
    double max_excess = -INFINITY;
    double d0 = 0.0;
    std::vector<double> ratio;  // d_k / d_0 at recorded times
  };
  const auto run_pair = [&](std::size_t p) {
    RngStream init(s.noise.master_seed, p, 0, StreamPurpose::kInitial);
    CircleFunction xa(s.grid), xb(s.grid);
    for (double& v : xa.values) v = init.normal();
    for (double& v : xb.values) v = init.normal();
    xa = rearrange(xa);
    xb = opt.identical ? xa : rearrange(xb);
    SchemeRunner a(s, xa), b(s, xb);
    PairResult out;
    out.d0 = l2_distance(xa, xb);
    out.ratio.reserve(records);
    out.ratio.push_back(out.d0 > 0.0 ? 1.0 : 0.0);
    double prev = out.d0;
    for (int k = 0; k < steps; ++k) {
      const ConvIncrement xi = conv_increment(s.noise, s.h, p, static_cast<std::uint32_t>(k));
      a.advance(xi);
      b.advance(xi);
      const double d = l2_distance(a.state(), b.state());
      out.max_excess = std::max(out.max_excess, d - prev);
      if (d > prev + opt.tolerance) ++out.violations;
      prev = d;
      if ((k + 1) % s.record_every == 0) out.ratio.push_back(out.d0 > 0.0 ? d / out.d0 : 0.0);
    }
    return out;
  };
  const std::vector<PairResult> pairs = parallel_map(cfg.paths, cfg.threads, run_pair);

  r.columns = {"t", "mean_ratio", "se_ratio", "max_ratio"};
  for (std::size_t k = 0; k < records; ++k) {
    std::vector<double> v;
    for (const auto& p : pairs) v.push_back(p.ratio[k]);
    const Estimate e = estimate(v);
    r.add_row({static_cast<double>(k) * s.h * s.record_every, e.mean, e.se, *std::max_element(v.begin(), v.end())});
  }
  long violations = 0;
  double max_excess = -INFINITY;
  std::vector<double> final_ratio;
  for (const auto& p : pairs) {
    violations += p.violations;
    max_excess = std::max(max_excess, p.max_excess);
    final_ratio.push_back(p.ratio.back());
  }
  const Spread sp = spread(final_ratio);
  r.summary = {{"pairs", cfg.paths},
               {"violations", violations},
               {"max_step_increase", json_number(max_excess)},
               {"final_ratio_min", sp.min},
               {"final_ratio_median", sp.median},
               {"final_ratio_max", sp.max}};
  r.check("d_{k+1} <= d_k + 1e-12 at every step", violations == 0, static_cast<double>(violations), 0,
          "largest step increase " + format_double(max_excess));
  r.check("d_N / d_0 in [0, 1]", sp.min >= 0.0 && sp.max <= 1.0 + opt.tolerance, sp.max, 1.0);
  return r;
}

// ---------------------------------------------------------------------------
// Derivative bound

struct DerivativeOptions {
  double early_time = 0.05;
  double late_time = 0.2;
  double exponent_target = -1.0;
  double exponent_band = 0.4;
  double fit_t_max = 0.1;  // the fit uses recorded times in (0, fit_t_max]
};

/// E ||D X_t||^2 from a rough start and from zero on shared noise, and the
/// decay of their difference.
inline ExperimentReport derivative_bound_experiment(const ExperimentConfig& cfg, const DerivativeOptions& opt = {}) {
  validate(cfg.scheme);
  detail::require_paths(cfg.paths);
  const SchemeConfig& s = cfg.scheme;
  require(s.T >= opt.late_time, "scheme.T must reach the late comparison time");
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "derivative";
  r.config = config_json(cfg);
  const CircleFunction x0 = initial_condition(cfg.initial, s.grid);
  const CircleFunction zero = constant(s.grid, 0.0);
  const int steps = s.steps();
  const std::size_t records = static_cast<std::size_t>(steps / s.record_every) + 1;
  const auto dnorm = [](const CircleFunction& x) { return std::pow(l2_norm(derivative(x)), 2); };

  struct PathResult {
    std::vector<double> rough, calm;
  };
  const auto run = [&](std::size_t p) {
    SchemeRunner a(s, x0), b(s, zero);
    PathResult out;
    out.rough.push_back(dnorm(x0));
    out.calm.push_back(0.0);
    for (int k = 0; k < steps; ++k) {
      const ConvIncrement xi = conv_increment(s.noise, s.h, p, static_cast<std::uint32_t>(k));
      a.advance(xi);
      b.advance(xi);
      if ((k + 1) % s.record_every == 0) {
        out.rough.push_back(dnorm(a.state()));
        out.calm.push_back(dnorm(b.state()));
      }
    }
    return out;
  };
  const std::vector<PathResult> paths = parallel_map(cfg.paths, cfg.threads, run);
  const double dt = s.h * s.record_every;
  r.columns = {"t", "mean_rough", "se_rough", "mean_zero_start", "se_zero_start", "mean_difference", "se_difference"};
  std::vector<double> fit_x, fit_y;
  std::vector<Estimate> calm_est(records), diff_est(records);
  for (std::size_t k = 0; k < records; ++k) {
    std::vector<double> a, b, d;
    for (const auto& p : paths) {
      a.push_back(p.rough[k]);
      b.push_back(p.calm[k]);
      d.push_back(p.rough[k] - p.calm[k]);
    }
    const Estimate ea = estimate(a), eb = estimate(b), ed = estimate(d);
    calm_est[k] = eb;
    diff_est[k] = ed;
    r.add_row({static_cast<double>(k) * dt, ea.mean, ea.se, eb.mean, eb.se, ed.mean, ed.se});
    const double t = static_cast<double>(k) * dt;
    if (k > 0 && t <= opt.fit_t_max * (1 + 1e-12) && ed.mean > 3.0 * ed.se && ed.mean > 1e-10 * (1.0 + ea.mean)) {
      fit_x.push_back(std::log(t));
      fit_y.push_back(std::log(ed.mean));
    }
  }
  // zero start: the first recorded value does not exceed the late level
  const Estimate first = calm_est[std::min<std::size_t>(1, records - 1)];
  const Estimate last = calm_est.back();
  r.check("zero start has no initial spike", first.mean <= last.mean + 3.0 * std::hypot(first.se, last.se),
          first.mean, last.mean);
  // smoothing in time on the rough start, pathwise pairing of the two times
  const std::size_t ke = detail::nearest_record(opt.early_time, dt, records);
  const std::size_t kl = detail::nearest_record(opt.late_time, dt, records);
  std::vector<double> drop;
  for (const auto& p : paths) drop.push_back(p.rough[kl] - p.rough[ke]);
  const Estimate ed = estimate(drop);
  r.check("E|DX|^2 at late time <= early time", ed.mean <= 3.0 * ed.se, ed.mean, 3.0 * ed.se,
          "late minus early, paired by path");
  nlohmann::json fit = nullptr;
  if (fit_x.size() >= 3) {
    const LinearFit f = fit_line(fit_x, fit_y);
    fit = {{"slope", f.slope}, {"ci_low", f.ci_low}, {"ci_high", f.ci_high}, {"points", f.points}};
    r.check("difference decay exponent", std::abs(f.slope - opt.exponent_target) <= opt.exponent_band, f.slope,
            opt.exponent_target, "band +-" + format_double(opt.exponent_band), /*soft=*/true);
  } else {
    r.check("difference decay exponent", false, NAN, opt.exponent_target, "fewer than 3 resolved points", true);
  }
  r.summary = {{"decay_fit", fit}};
  return r;
}

// ---------------------------------------------------------------------------
// Smoothing of the semigroup

struct SmoothingOptions {
  std::vector<double> t_grid = {1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0};
  int probes = 2;
  double alpha = 20.0;
  double delta = 0.05;
  double slope_low = -1.2;
  double slope_high = -0.55;
};

/// Probe k uses base state a_k e_1 (a_k = 0.25 (k / 2)) and direction e_1
/// for even k, (e_0 + e_1)/sqrt 2 for odd k. Both directions are monotone.
inline std::pair<CircleFunction, CircleFunction> smoothing_probe(int k, GridSpec grid) {
  const CircleFunction e0 = constant(grid, 1.0);
  const CircleFunction e1 = basis_function(grid, 1);
  const CircleFunction base = (0.25 * (k / 2)) * e1;
  const CircleFunction dir = k % 2 == 0 ? e1 : (1.0 / std::sqrt(2.0)) * (e0 + e1);
  return {base, dir};
}

inline ExperimentReport smoothing_experiment(const ExperimentConfig& cfg, const SmoothingOptions& opt = {}) {
  const SchemeConfig& s = cfg.scheme;
  require(s.noise.lambda > 0.5 && s.noise.lambda < 1.0,
          "noise.lambda must lie in (0.5, 1) for the smoothing experiment, got " + format_double(s.noise.lambda));
  require(opt.probes >= 1, "smoothing.probes must be >= 1");
  require(opt.delta >= 0.0, "smoothing.delta must be nonnegative");
  require(opt.alpha > 0.0, "smoothing.alpha must be positive");
  require(!opt.t_grid.empty(), "t_grid must not be empty");
  SchemeConfig run_cfg = s;
  run_cfg.T = *std::max_element(opt.t_grid.begin(), opt.t_grid.end());
  run_cfg.record_every = 1;
  validate(run_cfg);
  detail::require_paths(cfg.paths);
  std::vector<int> at_step;
  for (double t : opt.t_grid) {
    const double k = t / s.h;
    require(t > 0.0 && std::abs(k - std::round(k)) <= 1e-9 * std::max(1.0, k),
            "t_grid entries must be positive multiples of scheme.h");
    at_step.push_back(static_cast<int>(std::llround(k)));
  }
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "smoothing";
  r.config = config_json(cfg);
  r.config["t_grid"] = opt.t_grid;
  r.config["probes"] = opt.probes;
  r.config["alpha"] = opt.alpha;
  r.config["delta"] = opt.delta;

  // distinct base states; probes sharing a base share its run
  std::vector<CircleFunction> bases;
  std::vector<std::size_t> base_of;
  std::vector<CircleFunction> perturbed;
  for (int k = 0; k < opt.probes; ++k) {
    auto [base, dir] = smoothing_probe(k, s.grid);
    std::size_t b = bases.size();
    for (std::size_t i = 0; i < bases.size(); ++i) {
      if (bases[i] == base) b = i;
    }
    if (b == bases.size()) bases.push_back(base);
    base_of.push_back(b);
    perturbed.push_back(base + opt.delta * dir);
  }
  const CircleFunction e1 = basis_function(s.grid, 1);
  const auto functional = [&](const CircleFunction& x) { return std::tanh(opt.alpha * inner(x, e1)); };
  const int steps = run_cfg.steps();
  const std::size_t nt = opt.t_grid.size();

  // diff[probe * nt + i] = f(X^y_t) - f(X^x_t) on one path
  const auto run = [&](std::size_t p) {
    std::vector<SchemeRunner> base_runs, pert_runs;
    for (const auto& b : bases) base_runs.emplace_back(run_cfg, b);
    for (const auto& y : perturbed) pert_runs.emplace_back(run_cfg, y);
    std::vector<double> diff(static_cast<std::size_t>(opt.probes) * nt, 0.0);
    for (int k = 0; k < steps; ++k) {
      const ConvIncrement xi = conv_increment(s.noise, s.h, p, static_cast<std::uint32_t>(k));
      for (auto& b : base_runs) b.advance(xi);
      for (auto& y : pert_runs) y.advance(xi);
      for (std::size_t i = 0; i < nt; ++i) {
        if (at_step[i] != k + 1) continue;
        for (int q = 0; q < opt.probes; ++q) {
          const auto qi = static_cast<std::size_t>(q);
          diff[qi * nt + i] = functional(pert_runs[qi].state()) - functional(base_runs[base_of[qi]].state());
        }
      }
    }
    return diff;
  };
  const auto diffs = parallel_map(cfg.paths, cfg.threads, run);

  r.columns = {"t"};
  for (int q = 0; q < opt.probes; ++q) {
    r.columns.push_back("L_probe" + std::to_string(q));
    r.columns.push_back("se_probe" + std::to_string(q));
  }
  r.columns.push_back("L_max");
  // |f(X^x) - f(X^y)| <= alpha |X^x - X^y| <= alpha delta pathwise
  bool under_ceiling = true;
  double worst_ratio = 0.0;
  std::vector<double> fit_x, fit_y;
  for (std::size_t i = 0; i < nt; ++i) {
    std::vector<double> row{opt.t_grid[i]};
    double best = 0.0, best_se = 0.0;
    for (int q = 0; q < opt.probes; ++q) {
      std::vector<double> v;
      for (const auto& d : diffs) v.push_back(d[static_cast<std::size_t>(q) * nt + i]);
      const Estimate e = estimate(v);
      const double lip = opt.delta > 0.0 ? std::abs(e.mean) / opt.delta : 0.0;
      const double se = opt.delta > 0.0 ? e.se / opt.delta : 0.0;
      for (double x : v) {
        const double bound = opt.alpha * opt.delta * (1.0 + 1e-9);
        under_ceiling = under_ceiling && std::abs(x) <= bound;
        if (opt.delta > 0.0) worst_ratio = std::max(worst_ratio, std::abs(x) / (opt.alpha * opt.delta));
      }
      row.push_back(lip);
      row.push_back(se);
      if (lip > best) {
        best = lip;
        best_se = se;
      }
    }
    row.push_back(best);
    r.add_row(row);
    // resolved beyond 2 SE and above the round-off floor of tanh differences
    if (best > 2.0 * best_se && best * opt.delta > 1e-12) {
      fit_x.push_back(std::log(opt.t_grid[i]));
      fit_y.push_back(std::log(best));
    }
  }
  const double target = -(1.0 + s.noise.lambda) / 2.0;
  r.check("pathwise ceiling alpha * delta", under_ceiling, worst_ratio, 1.0, "max |f(X^y)-f(X^x)| / (alpha delta)");
  nlohmann::json fit = nullptr;
  if (fit_x.size() >= 2) {
    const LinearFit f = fit_line(fit_x, fit_y);
    fit = {{"slope", f.slope},   {"ci_low", f.ci_low}, {"ci_high", f.ci_high},
           {"points", f.points}, {"target", target}};
    r.check("log-log slope of max-probe L(t)", f.slope >= opt.slope_low && f.slope <= opt.slope_high, f.slope,
            target, "band [" + format_double(opt.slope_low) + ", " + format_double(opt.slope_high) + "]",
            /*soft=*/true);
  } else {
    r.check("log-log slope of max-probe L(t)", false, NAN, target,
            "fewer than 2 time points resolved beyond 2 SE", /*soft=*/true);
  }
  r.summary = {{"fit", fit}, {"target_slope", target}, {"fit_points_used", fit_x.size()}};
  return r;
}

// ---------------------------------------------------------------------------
// Reflection structure

struct ReflectionOptions {
  std::vector<double> kernel_times = {0.001, 0.01, 0.1};
  int max_split_mode = 8;
};

/// Per-step positivity of <Delta eta, u> for monotone u, exact mean
/// neutrality and the right-endpoint identity at eps = 0.
inline ExperimentReport reflection_experiment(const ExperimentConfig& cfg, const ReflectionOptions& opt = {}) {
  SchemeConfig s = cfg.scheme;
  s.record_every = 1;
  s.keep_pre_states = true;
  validate(s);
  detail::require_paths(cfg.paths);
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "reflection";
  r.config = config_json(cfg);
  std::vector<CircleFunction> tests;
  for (double t : opt.kernel_times) tests.push_back(heat_kernel(t, s.grid));
  for (int m = 0; m <= std::min(opt.max_split_mode, s.grid.half() - 1); ++m) {
    auto [p, q] = split_mode(m, s.grid);
    tests.push_back(std::move(p));
    tests.push_back(std::move(q));
  }
  const CircleFunction x0 = initial_condition(cfg.initial, s.grid);
  const CircleFunction one = constant(s.grid, 1.0);

  struct PathResult {
    double min_pairing = INFINITY;  // min over steps and u of <d,u> / (|u||d|)
    long negative = 0;
    double mean_defect = 0.0;       // max |<eta_t, e_0>|
    double identity_error = 0.0;    // relative
    double half_qv = 0.0;
  };
  const auto run = [&](std::size_t p) {
    const Trajectory traj = simulate(s, x0, p);
    const ReflectionPath path = eta_from_trajectory(traj);
    PathResult out;
    for (const auto& d : path.increments) {
      const double dn = l2_norm(d);
      if (dn == 0.0) continue;
      for (const auto& u : tests) {
        const double un = l2_norm(u);
        const double v = inner(d, u);
        if (un > 0.0) out.min_pairing = std::min(out.min_pairing, v / (un * dn));
        if (v < -1e-12 * un * dn) ++out.negative;
      }
    }
    for (double v : eta_pairing(path, one)) out.mean_defect = std::max(out.mean_defect, std::abs(v));
    const OrthogonalityDefect o = orthogonality_defect(traj, 0.0);
    for (const auto& d : traj.reflection) out.half_qv += 0.5 * std::pow(l2_norm(d), 2);
    out.identity_error = std::abs(o.right - out.half_qv) / std::max(1.0, out.half_qv);
    return out;
  };
  const auto results = parallel_map(cfg.paths, cfg.threads, run);
  r.columns = {"path", "min_normalised_pairing", "mean_pairing_max", "right_identity_error", "half_quadratic_variation"};
  long negative = 0;
  double worst_mean = 0.0, worst_identity = 0.0, min_pairing = INFINITY;
  for (std::size_t p = 0; p < results.size(); ++p) {
    const auto& x = results[p];
    negative += x.negative;
    worst_mean = std::max(worst_mean, x.mean_defect);
    worst_identity = std::max(worst_identity, x.identity_error);
    min_pairing = std::min(min_pairing, x.min_pairing);
    r.add_row({static_cast<double>(p), x.min_pairing, x.mean_defect, x.identity_error, x.half_qv});
  }
  r.check("<Delta eta_k, u> >= -1e-12 |u||Delta eta_k| for monotone u", negative == 0,
          static_cast<double>(negative), 0, "smallest normalised pairing " + format_double(min_pairing));
  r.check("<eta_t, e_0> = 0 exactly", worst_mean == 0.0, worst_mean, 0.0);
  r.check("right-endpoint identity at eps = 0", worst_identity <= 1e-12, worst_identity, 1e-12);
  return r;
}

// ---------------------------------------------------------------------------
// Orthogonality defect

struct OrthogonalityOptions {
  std::vector<double> h_grid = {4e-3, 2e-3, 1e-3};
  std::vector<double> eps_grid = {0.0, 1e-3, 1e-2};
};

inline ExperimentReport orthogonality_experiment(const ExperimentConfig& cfg, const OrthogonalityOptions& opt = {}) {
  detail::require_paths(cfg.paths);
  require(!opt.h_grid.empty() && !opt.eps_grid.empty(), "h_grid and eps_grid must not be empty");
  for (double e : opt.eps_grid) require(e >= 0.0, "eps_grid entries must be nonnegative");
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "orthogonality";
  r.config = config_json(cfg);
  r.config["h_grid"] = opt.h_grid;
  r.config["eps_grid"] = opt.eps_grid;
  r.columns = {"h", "eps", "mean_left", "se_left", "mean_right", "se_right"};
  const std::size_t ne = opt.eps_grid.size();
  long negative = 0;
  std::vector<Estimate> right_at_zero;
  std::vector<double> h_for_zero;
  for (std::size_t hi = 0; hi < opt.h_grid.size(); ++hi) {
    SchemeConfig s = cfg.scheme;
    s.h = opt.h_grid[hi];
    s.record_every = 1;
    s.keep_pre_states = true;
    s.noise.master_seed = cfg.scheme.noise.master_seed + 7919 * (hi + 1);
    validate(s);
    const CircleFunction x0 = initial_condition(cfg.initial, s.grid);
    struct PathResult {
      std::vector<double> left, right;
      long negative = 0;
    };
    const auto run = [&](std::size_t p) {
      const Trajectory traj = simulate(s, x0, p);
      PathResult out;
      double scale = 0.0;
      for (std::size_t k = 0; k + 1 < traj.records(); ++k) scale += l2_norm(traj.states[k]) * l2_norm(traj.reflection[k]);
      for (double e : opt.eps_grid) {
        const OrthogonalityDefect o = orthogonality_defect(traj, e);
        out.left.push_back(o.left);
        out.right.push_back(o.right);
        if (o.left < -1e-10 * scale) ++out.negative;
        if (o.right < -1e-10 * scale) ++out.negative;
      }
      return out;
    };
    const auto results = parallel_map(cfg.paths, cfg.threads, run);
    for (std::size_t ei = 0; ei < ne; ++ei) {
      std::vector<double> left, right;
      for (const auto& x : results) {
        left.push_back(x.left[ei]);
        right.push_back(x.right[ei]);
      }
      const Estimate el = estimate(left), er = estimate(right);
      r.add_row({s.h, opt.eps_grid[ei], el.mean, el.se, er.mean, er.se});
      if (opt.eps_grid[ei] == 0.0) {
        right_at_zero.push_back(er);
        h_for_zero.push_back(s.h);
      }
    }
    for (const auto& x : results) negative += x.negative;
  }
  r.check("Stieltjes sums against X nonnegative", negative == 0, static_cast<double>(negative), 0,
          "all (eps, h, path), tolerance 1e-10 scale");
  // order by decreasing h and require each finer level to sit lower by more than 1 SE
  std::vector<std::size_t> order(h_for_zero.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return h_for_zero[a] > h_for_zero[b]; });
  if (order.size() >= 2) {
    bool decreasing = true;
    double worst_margin = INFINITY;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const Estimate& a = right_at_zero[order[i]];
      const Estimate& b = right_at_zero[order[i + 1]];
      const double margin = (a.mean - b.mean) / std::hypot(a.se, b.se);
      worst_margin = std::min(worst_margin, margin);
      decreasing = decreasing && margin > 1.0;
    }
    r.check("right-endpoint defect at eps=0 decreases with h", decreasing, worst_margin, 1.0,
            "smallest drop between consecutive h, in combined SE");
    nlohmann::json trend = nlohmann::json::array();
    for (std::size_t i : order) {
      trend.push_back({{"h", h_for_zero[i]}, {"mean", right_at_zero[i].mean}, {"se", right_at_zero[i].se}});
    }
    r.summary["right_defect_eps0"] = trend;
  }
  // eps -> 0 plateau at the finest step
  const double h_min = *std::min_element(opt.h_grid.begin(), opt.h_grid.end());
  const double e_min = *std::min_element(opt.eps_grid.begin(), opt.eps_grid.end());
  for (const auto& row : r.rows) {
    if (row[0] == h_min && row[1] == e_min) r.summary["plateau_left"] = row[2];
  }
  return r;
}

// ---------------------------------------------------------------------------
// Energy balance

struct EnergyOptions {
  std::vector<double> eps_grid = {0.0};
  double slack_factor = 5.0;  // deterministic slack slack_factor * h * trace * T
};

inline ExperimentReport energy_experiment(const ExperimentConfig& cfg, const EnergyOptions& opt = {}) {
  SchemeConfig s = cfg.scheme;
  s.record_every = 1;
  s.keep_pre_states = true;
  validate(s);
  detail::require_paths(cfg.paths);
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "energy";
  r.config = config_json(cfg);
  r.config["eps_grid"] = opt.eps_grid;
  const CircleFunction x0 = initial_condition(cfg.initial, s.grid);
  const auto terms = parallel_map(cfg.paths, cfg.threads, [&](std::size_t p) {
    const Trajectory traj = simulate(s, x0, p);
    std::vector<EnergyTerms> out;
    for (double e : opt.eps_grid) out.push_back(energy_terms(traj, s.noise, e));
    return out;
  });
  r.columns = {"eps",           "residual",       "se",           "final_energy",   "dissipation",
               "noise_dissipation", "noise_input", "orth_mid",     "residual_left", "residual_right",
               "quadratic_variation"};
  const double slack = opt.slack_factor * s.h * trace_constant(s.noise) * s.T;
  for (std::size_t i = 0; i < opt.eps_grid.size(); ++i) {
    std::vector<EnergyTerms> col;
    for (const auto& t : terms) col.push_back(t[i]);
    const EnergyBalance b = energy_balance_report(col);
    r.add_row({opt.eps_grid[i], b.residual, b.standard_error, b.mean.final_energy, b.mean.dissipation,
               b.mean.noise_dissipation, b.mean.noise_input, b.mean.orth_mid, b.residual_left, b.residual_right,
               b.mean.quadratic_variation});
    const std::string tag = " (eps=" + format_double(opt.eps_grid[i]) + ")";
    const double band = 3.0 * b.standard_error + slack;
    r.check("|R(T)| <= 3 SE + " + format_double(opt.slack_factor) + " h trace T" + tag, std::abs(b.residual) <= band,
            b.residual, band);
    const double scale = 1.0 + b.mean.final_energy;
    r.check("per-step |X_{k+1}|^2 = |Z_{k+1}|^2" + tag, b.max_step_identity_error <= 1e-12 * scale,
            b.max_step_identity_error, 1e-12 * scale);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Convergence across dyadic step sizes

struct ConvergenceOptions {
  int levels = 4;
};

/// Level l uses step h / 2^l. The finest increments are drawn once per path
/// and aggregated upward, so all levels see the same Brownian path.
inline ExperimentReport convergence_experiment(const ExperimentConfig& cfg, const ConvergenceOptions& opt = {}) {
  require(opt.levels >= 2 && opt.levels <= 5, "levels must lie in [2, 5]");
  detail::require_paths(cfg.paths);
  SchemeConfig base = cfg.scheme;
  base.keep_pre_states = false;
  base.record_every = base.steps();
  validate(base);
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "convergence";
  r.config = config_json(cfg);
  r.config["levels"] = opt.levels;
  const int finest = opt.levels - 1;
  const double h_fine = base.h / std::pow(2.0, finest);
  const int n_fine = base.steps() << finest;
  const CircleFunction x0 = initial_condition(cfg.initial, base.grid);

  const auto run = [&](std::size_t p) {
    std::vector<ConvIncrement> inc;
    inc.reserve(static_cast<std::size_t>(n_fine));
    for (int k = 0; k < n_fine; ++k) inc.push_back(conv_increment(base.noise, h_fine, p, static_cast<std::uint32_t>(k)));
    std::vector<CircleFunction> finals(static_cast<std::size_t>(opt.levels), constant(base.grid, 0.0));
    double h = h_fine;
    for (int level = finest; level >= 0; --level) {
      SchemeConfig s = base;
      s.h = h;
      s.record_every = static_cast<int>(inc.size());
      const Trajectory traj = simulate(s, x0, ReplayNoise{inc});
      finals[static_cast<std::size_t>(level)] = traj.states.back();
      if (level == 0) break;
      std::vector<ConvIncrement> coarse;
      coarse.reserve(inc.size() / 2);
      for (std::size_t k = 0; k + 1 < inc.size(); k += 2) coarse.push_back(aggregate(inc[k], inc[k + 1], h));
      inc = std::move(coarse);
      h *= 2.0;
    }
    std::vector<double> diff;
    for (int l = 0; l + 1 < opt.levels; ++l) {
      diff.push_back(l2_distance(finals[static_cast<std::size_t>(l)], finals[static_cast<std::size_t>(l + 1)]));
    }
    return diff;
  };
  const auto diffs = parallel_map(cfg.paths, cfg.threads, run);
  r.columns = {"h", "mean_difference", "se_difference"};
  std::vector<Estimate> est;
  std::vector<double> lx, ly;
  for (int l = 0; l + 1 < opt.levels; ++l) {
    std::vector<double> v;
    for (const auto& d : diffs) v.push_back(d[static_cast<std::size_t>(l)]);
    const Estimate e = estimate(v);
    est.push_back(e);
    const double h = base.h / std::pow(2.0, l);
    r.add_row({h, e.mean, e.se});
    if (e.mean > 0.0) {
      lx.push_back(std::log(h));
      ly.push_back(std::log(e.mean));
    }
  }
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < est.size(); ++i) monotone = monotone && est[i + 1].mean < est[i].mean;
  const double largest = est.front().mean;
  nlohmann::json order = nullptr;
  if (lx.size() >= 2) {
    const LinearFit f = fit_line(lx, ly);
    order = {{"order", f.slope}, {"ci_low", f.ci_low}, {"ci_high", f.ci_high}, {"points", f.points}};
  }
  r.summary = {{"empirical_order", order}, {"largest_difference", largest}};
  if (largest <= 1e-10) {
    r.check("differences at round-off level", true, largest, 1e-10);
  } else {
    r.check("E|X^h_T - X^{h/2}_T| decreases as h halves", monotone, static_cast<double>(est.size()), 0,
            "levels compared: " + std::to_string(est.size()), /*soft=*/true);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Measure bridge

struct BridgeOptions {
  int pairs = 1000;
  int pair_grid = 64;
  int uniform_grid = 1 << 17;
  int normal_grid = 256;
  std::size_t normal_samples = 100000;
  std::uint64_t seed = 1;
};

inline ExperimentReport bridge_experiment(const BridgeOptions& opt = {}) {
  require(opt.pairs >= 1, "bridge.pairs must be >= 1");
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "bridge";
  r.config = {{"pairs", opt.pairs},
              {"pair_grid", opt.pair_grid},
              {"uniform_grid", opt.uniform_grid},
              {"normal_grid", opt.normal_grid},
              {"normal_samples", opt.normal_samples},
              {"seed", opt.seed}};
  r.columns = {"case", "w2", "oracle", "abs_error"};
  const GridSpec g = make_grid(opt.pair_grid);
  double worst = 0.0;
  for (int c = 0; c < opt.pairs; ++c) {
    RngStream rng(opt.seed, static_cast<std::uint64_t>(c), 0, StreamPurpose::kMeasure);
    CircleFunction a(g), b(g);
    for (double& v : a.values) v = rng.normal();
    for (double& v : b.values) v = 2.0 * rng.uniform();
    a = rearrange(a);
    b = rearrange(b);
    const double d = w2(a, b);
    const double o = w2_oracle(a.values, b.values);
    worst = std::max(worst, std::abs(d - o));
    r.add_row({static_cast<double>(c), d, o, std::abs(d - o)});
  }
  r.check("w2 equals sorted-coupling oracle", worst <= 1e-10, worst, 1e-10);

  const GridSpec ug = make_grid(opt.uniform_grid);
  QuantileFn q1, q2;
  for (int i = 0; i <= ug.half(); ++i) {
    const double u = 2.0 * i / ug.n;
    q1.u.push_back(u);
    q2.u.push_back(u);
    q1.q.push_back(u);
    q2.q.push_back(2.0 * u);
  }
  const double uni = w2(quantile_to_ustar(q1), quantile_to_ustar(q2));
  const double exact = 1.0 / std::sqrt(3.0);
  r.summary["uniform_w2"] = uni;
  r.check("Uniform[0,1] vs Uniform[0,2] equals 1/sqrt(3)", std::abs(uni - exact) <= 1e-10, std::abs(uni - exact),
          1e-10);

  RngStream rng(opt.seed, 1u << 30, 1, StreamPurpose::kMeasure);
  std::vector<double> samples(opt.normal_samples);
  for (double& v : samples) v = rng.normal();
  const GridSpec ng = make_grid(opt.normal_grid);
  QuantileFn nq;
  for (int i = 0; i <= ng.half(); ++i) {
    nq.u.push_back(2.0 * i / ng.n);
    // inverse normal CDF at the representative level, by bisection on erfc
    const double p = representative_level(i, ng.n);
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
    }
    nq.q.push_back(0.5 * (lo + hi));
  }
  const CircleFunction ingested = empirical_to_ustar(samples, ng);
  const double dn = w2(ingested, quantile_to_ustar(nq));
  r.summary["normal_ingestion_w2"] = dn;
  r.check("ingested N(0,1) samples within 0.02 of exact quantiles", dn <= 0.02, dn, 0.02);
  r.check("ingestion output monotone", is_symmetric_nonincreasing(ingested, 0.0), 0.0, 0.0);
  return r;
}

}  // namespace rshe
