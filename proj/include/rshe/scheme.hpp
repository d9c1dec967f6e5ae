// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Splitting scheme X_{n+1} = (e^{h Laplacian} X_n + xi_{n+1})^* together with
// the companion heat-plus-noise process V driven by the same increments.
#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rshe/grid.hpp"
#include "rshe/heat.hpp"
#include "rshe/noise.hpp"
#include "rshe/rearrange.hpp"

namespace rshe {

struct SchemeConfig {
  GridSpec grid;
  NoiseSpec noise;
  double h = 1e-3;
  double T = 1.0;
  int record_every = 1;
  /// Keep Z_k = e^{h Laplacian} X_{k-1} + xi_k; only possible with record_every == 1.
  bool keep_pre_states = true;

  [[nodiscard]] int steps() const { return static_cast<int>(std::llround(T / h)); }
};

inline void validate(const SchemeConfig& cfg) {
  make_grid(cfg.grid.n);
  validate(cfg.noise);
  require(cfg.noise.cutoff <= cfg.grid.half() - 1,
          "modes.cutoff must not exceed n/2 - 1 = " + std::to_string(cfg.grid.half() - 1));
  require(cfg.h > 0.0 && cfg.h < 1.0, "scheme.h must lie in (0, 1)");
  require(cfg.T > 0.0, "scheme.T must be positive");
  const double ratio = cfg.T / cfg.h;
  require(std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio),
          "scheme.T must be an integer multiple of scheme.h");
  require(cfg.record_every >= 1, "scheme.record_every must be >= 1");
  require(cfg.steps() % cfg.record_every == 0,
          "scheme.record_every must divide the number of steps");
}

/// Noise sources map a step index to the increment used by that step.
struct StreamNoise {
  NoiseSpec spec;
  double h;
  std::uint64_t trajectory;
  ConvIncrement operator()(int step) const {
    return conv_increment(spec, h, trajectory, static_cast<std::uint32_t>(step));
  }
};

struct ZeroNoise {
  NoiseSpec spec;
  double h;
  ConvIncrement operator()(int /*step*/) const { return zero_increment(spec, h); }
};

struct ReplayNoise {
  std::span<const ConvIncrement> increments;
  ConvIncrement operator()(int step) const { return increments[static_cast<std::size_t>(step)]; }
};

template <class S>
concept NoiseSource = requires(const S& s, int k) {
  { s(k) } -> std::convertible_to<ConvIncrement>;
};

struct StepResult {
  CircleFunction next;
  CircleFunction pre;
};

namespace detail {

inline CircleFunction heat_plus_noise(const CircleFunction& x, double h, const ConvIncrement& xi) {
  const int half = x.grid.half();
  FourierCoeffs c = heat_modes(analyze(x, half), h);
  for (std::size_t m = 0; m < xi.gauss.size(); ++m) c.cos[m] += xi.gauss[m];
  return synthesize(c, x.grid);
}

}  // namespace detail

inline StepResult step(const CircleFunction& x, const SchemeConfig& cfg, const ConvIncrement& xi) {
  require(x.grid == cfg.grid, "step: state grid does not match configuration");
  require(xi.h == cfg.h, "step: increment step length does not match scheme.h");
  require(xi.cutoff() <= cfg.grid.half() - 1, "step: increment cutoff exceeds grid Nyquist");
  CircleFunction z = detail::heat_plus_noise(x, cfg.h, xi);
  CircleFunction next = rearrange(z);
  return {std::move(next), std::move(z)};
}

/// Advances X and the companion V in lockstep. V is kept in mode space.
class SchemeRunner {
 public:
  SchemeRunner(const SchemeConfig& cfg, CircleFunction x0)
      : cfg_(cfg), x_(std::move(x0)), pre_(cfg.grid), reflection_(cfg.grid),
        v_modes_(detail::analyze(x_, cfg.grid.half())) {}

  void advance(const ConvIncrement& xi) {
    StepResult r = step(x_, cfg_, xi);
    v_modes_ = heat_modes(std::move(v_modes_), cfg_.h);
    for (std::size_t m = 0; m < xi.gauss.size(); ++m) v_modes_.cos[m] += xi.gauss[m];
    for (std::size_t i = 0; i < reflection_.size(); ++i) {
      reflection_.values[i] = r.next.values[i] - r.pre.values[i];
    }
    x_ = std::move(r.next);
    pre_ = std::move(r.pre);
    if (!is_finite(x_)) throw NumericalError("non-finite value in scheme state");
  }

  [[nodiscard]] const CircleFunction& state() const { return x_; }
  [[nodiscard]] const CircleFunction& pre_state() const { return pre_; }
  /// Delta eta of the last step: X_{k+1} - Z_{k+1}.
  [[nodiscard]] const CircleFunction& reflection_increment() const { return reflection_; }
  [[nodiscard]] CircleFunction companion() const { return detail::synthesize(v_modes_, cfg_.grid); }

 private:
  SchemeConfig cfg_;
  CircleFunction x_;
  CircleFunction pre_;
  CircleFunction reflection_;
  FourierCoeffs v_modes_;
};

struct Trajectory {
  double h = 0.0;
  int record_every = 1;
  std::vector<double> times;
  std::vector<CircleFunction> states;     // X at times[r]
  std::vector<CircleFunction> companion;  // V at times[r]
  /// pre_states[r] is the Z that produced states[r + 1]; empty unless kept.
  std::vector<CircleFunction> pre_states;
  /// reflection[r]: sum of Delta eta over the steps between times[r] and times[r + 1].
  std::vector<CircleFunction> reflection;

  [[nodiscard]] std::size_t records() const { return times.size(); }
  [[nodiscard]] bool has_pre_states() const {
    return !pre_states.empty() && pre_states.size() + 1 == states.size();
  }
};

inline double monotone_tolerance(const CircleFunction& f) {
  return 1e-9 * std::max(1.0, l2_norm(f));
}

template <NoiseSource Source>
Trajectory simulate(const SchemeConfig& cfg, const CircleFunction& x0, const Source& source) {
  validate(cfg);
  require(x0.grid == cfg.grid, "simulate: initial condition grid does not match grid.n");
  require(is_finite(x0), "simulate: initial condition has non-finite values");
  require(is_symmetric_nonincreasing(x0, monotone_tolerance(x0)),
          "simulate: initial condition is not symmetric non-increasing");
  const bool keep_pre = cfg.keep_pre_states && cfg.record_every == 1;
  Trajectory traj;
  traj.h = cfg.h;
  traj.record_every = cfg.record_every;
  SchemeRunner runner(cfg, x0);
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  traj.companion.push_back(runner.companion());
  CircleFunction acc(cfg.grid);
  const int n_steps = cfg.steps();
  for (int k = 0; k < n_steps; ++k) {
    runner.advance(source(k));
    acc += runner.reflection_increment();
    if ((k + 1) % cfg.record_every == 0) {
      traj.times.push_back(static_cast<double>(k + 1) * cfg.h);
      traj.states.push_back(runner.state());
      traj.companion.push_back(runner.companion());
      if (keep_pre) traj.pre_states.push_back(runner.pre_state());
      traj.reflection.push_back(acc);
      acc = CircleFunction(cfg.grid);
    }
  }
  return traj;
}

inline Trajectory simulate(const SchemeConfig& cfg, const CircleFunction& x0,
                           std::uint64_t trajectory) {
  return simulate(cfg, x0, StreamNoise{cfg.noise, cfg.h, trajectory});
}

/// Two runs fed by the identical increment sequence.
template <NoiseSource Source>
std::pair<Trajectory, Trajectory> coupled_simulate(const SchemeConfig& cfg, const CircleFunction& xa,
                                                   const CircleFunction& xb, const Source& source) {
  std::vector<ConvIncrement> increments;
  increments.reserve(static_cast<std::size_t>(cfg.steps()));
  for (int k = 0; k < cfg.steps(); ++k) increments.push_back(source(k));
  const ReplayNoise replay{increments};
  return {simulate(cfg, xa, replay), simulate(cfg, xb, replay)};
}

/// Linear blend of the two recorded states bracketing t.
inline CircleFunction interpolate(const Trajectory& traj, double t) {
  require(!traj.times.empty(), "interpolate: empty trajectory");
  const double dt = traj.h * traj.record_every;
  const double t_end = traj.times.back();
  require(t >= 0.0 && t <= t_end * (1.0 + 1e-12), "interpolate: time outside the recorded range");
  const double s = std::min(t / dt, static_cast<double>(traj.records() - 1));
  const auto lo = static_cast<std::size_t>(std::floor(s));
  const double w = s - static_cast<double>(lo);
  if (w == 0.0 || lo + 1 >= traj.records()) return traj.states[lo];
  CircleFunction out = traj.states[lo];
  const CircleFunction& hi = traj.states[lo + 1];
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] = (1.0 - w) * out.values[i] + w * hi.values[i];
  }
  return out;
}

}  // namespace rshe
