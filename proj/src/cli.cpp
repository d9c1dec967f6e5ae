// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0

#include "rshe/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rshe/config.hpp"
#include "rshe/experiments.hpp"
#include "rshe/properties.hpp"

namespace rshe {
namespace {

struct Options {
  std::string config_path;
  std::string out_dir;
  unsigned threads = default_threads();
  bool svg = false;
  std::optional<std::uint64_t> seed;
};

std::string resolve_out_dir(const Options& o, const RunConfig& c) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv("RSHE_OUT"); env != nullptr && *env != '\0') return env;
  return ".";
}

void emit(const ExperimentReport& r, const std::string& dir, bool svg, std::ostream& out) {
  const std::filesystem::path base = std::filesystem::path(dir) / r.name;
  write_text(base.string() + ".csv", to_csv(r));
  write_text(base.string() + ".report.json", to_json(r).dump(2) + "\n");
  if (svg) write_text(base.string() + ".svg", to_svg(r));
  out << r.name << ": " << to_string(r.status()) << '\n';
  for (const Verdict& v : r.verdicts) {
    out << "  [" << to_string(v.status) << "] " << v.name << " (value " << format_double(v.value) << ", threshold "
        << format_double(v.threshold) << ")\n";
  }
}

ExperimentReport simulate_report(const RunConfig& c) {
  const SchemeConfig s = c.scheme();
  ExperimentReport r;
  ReportTimer timer(r);
  r.name = "simulate";
  r.config = config_json(c.experiment(1));
  const CircleFunction x0 = initial_condition(c.initial, s.grid);
  const Trajectory traj = simulate(s, x0, 0);
  r.columns = {"t", "l2_norm"};
  for (int i = 0; i < s.grid.n; ++i) r.columns.push_back("x_" + std::to_string(i - s.grid.half() + 1));
  bool monotone = true, finite = true;
  double heat_error = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const CircleFunction& x = traj.states[k];
    std::vector<double> row = {traj.times[k], l2_norm(x)};
    row.insert(row.end(), x.values.begin(), x.values.end());
    for (double v : x.values) finite = finite && std::isfinite(v);
    monotone = monotone && is_symmetric_nonincreasing(x, 0.0);
    if (s.noise.scale == 0.0) heat_error = std::max(heat_error, l2_distance(x, heat_apply(traj.times[k], x0)));
    r.add_row(std::move(row));
  }
  r.check("all values finite", finite, finite ? 0.0 : 1.0, 0.0);
  r.check("every recorded state symmetric nonincreasing", monotone, monotone ? 0.0 : 1.0, 0.0);
  if (s.noise.scale == 0.0) {
    // Equality needs the heat flow itself to stay monotone on the grid; a
    // discontinuous start rings and the scheme rearranges the ringing away.
    bool heat_monotone = true;
    for (int k = 1; k <= s.steps() && heat_monotone; ++k) {
      heat_monotone = is_symmetric_nonincreasing(heat_apply(k * s.h, x0), 0.0);
    }
    r.check("zero noise equals heat flow", heat_error <= 1e-10, heat_error, 1e-10,
            heat_monotone ? "" : "heat flow leaves the monotone cone on this grid", !heat_monotone);
  }
  return r;
}

std::vector<ExperimentReport> properties_reports(std::uint64_t seed) {
  const std::vector<int> rearr_sizes = {4, 16, 64, 256};
  const std::vector<int> riesz_sizes = {64, 256};
  std::vector<ExperimentReport> out;
  out.push_back(rearrangement_suite(rearr_sizes, 10000, seed));
  out.push_back(riesz_polya_suite(riesz_sizes, 1000, seed));
  out.push_back(key_inequality_suite(64, 1000, seed));
  out.push_back(heat_suite(seed));
  out.push_back(noise_suite(seed));
  return out;
}

ExperimentReport properties_summary(const std::vector<ExperimentReport>& parts, std::uint64_t seed) {
  ExperimentReport r;
  r.name = "properties";
  r.config = {{"seed", seed}};
  r.columns = {"suite", "pass", "warn", "fail", "wall_seconds"};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    double counts[3] = {0, 0, 0};
    for (const Verdict& v : parts[i].verdicts) counts[static_cast<int>(v.status)] += 1;
    r.add_row({static_cast<double>(i), counts[0], counts[1], counts[2], parts[i].wall_seconds});
    r.summary["suites"].push_back(parts[i].name);
    r.wall_seconds += parts[i].wall_seconds;
    r.check(parts[i].name, parts[i].status() != Status::kFail, counts[2], 0.0, {}, parts[i].status() == Status::kWarn);
  }
  return r;
}

ExperimentReport bridge_report(const RunConfig& c) {
  BridgeOptions opt;
  opt.pairs = c.bridge_pairs;
  opt.seed = c.seed;
  ExperimentReport r = bridge_experiment(opt);
  if (!c.bridge_samples.empty()) {
    const std::vector<double> samples = read_samples(c.bridge_samples);
    const GridSpec g = make_grid(c.n);
    const CircleFunction f = empirical_to_ustar(samples, g);
    r.summary["samples"] = {{"path", c.bridge_samples},
                            {"count", samples.size()},
                            {"grid.n", c.n},
                            {"w2_to_dirac_zero", w2(f, constant(g, 0.0))}};
    r.check("ingested sample file is symmetric nonincreasing", is_symmetric_nonincreasing(f, 0.0), 0.0, 0.0);
  }
  return r;
}

using Runner = std::function<std::vector<ExperimentReport>(const RunConfig&, unsigned)>;

std::map<std::string, std::pair<std::string, Runner>> commands() {
  std::map<std::string, std::pair<std::string, Runner>> m;
  m["properties"] = {"randomised checks of the deterministic building blocks",
                     [](const RunConfig& c, unsigned) {
                       std::vector<ExperimentReport> parts = properties_reports(c.seed);
                       parts.push_back(properties_summary(parts, c.seed));
                       return parts;
                     }};
  m["simulate"] = {"one trajectory: time, L2 norm and grid values per record",
                   [](const RunConfig& c, unsigned) { return std::vector{simulate_report(c)}; }};
  m["contraction"] = {"coupled pairs: L2 distance never increases",
                      [](const RunConfig& c, unsigned t) { return std::vector{contraction_experiment(c.experiment(t))}; }};
  m["derivative"] = {"mean squared derivative decay along trajectories",
                     [](const RunConfig& c, unsigned t) {
                       return std::vector{derivative_bound_experiment(c.experiment(t))};
                     }};
  m["smoothing"] = {"Lipschitz constant of the semigroup against time",
                    [](const RunConfig& c, unsigned t) {
                      SmoothingOptions o;
                      o.t_grid = c.t_grid;
                      o.probes = c.probes;
                      o.alpha = c.alpha;
                      o.delta = c.delta;
                      return std::vector{smoothing_experiment(c.experiment(t), o)};
                    }};
  m["reflection"] = {"reflection measure positivity and orthogonality defects",
                     [](const RunConfig& c, unsigned t) {
                       OrthogonalityOptions o;
                       o.h_grid = c.h_grid;
                       o.eps_grid = c.eps_grid;
                       return std::vector{reflection_experiment(c.experiment(t)),
                                          orthogonality_experiment(c.experiment(t), o)};
                     }};
  m["energy"] = {"energy balance residual",
                 [](const RunConfig& c, unsigned t) {
                   EnergyOptions o;
                   o.eps_grid = c.eps_grid;
                   return std::vector{energy_experiment(c.experiment(t), o)};
                 }};
  m["convergence"] = {"differences between dyadic step sizes on shared noise",
                      [](const RunConfig& c, unsigned t) {
                        ConvergenceOptions o;
                        o.levels = c.levels;
                        return std::vector{convergence_experiment(c.experiment(t), o)};
                      }};
  m["bridge"] = {"Wasserstein distance through the quantile bridge",
                 [](const RunConfig& c, unsigned) { return std::vector{bridge_report(c)}; }};
  return m;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rshe: rearranged stochastic heat equation lab"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  std::uint64_t seed = 0;
  app.add_option("--config", opt.config_path, "config file (key = value lines or JSON)");
  app.add_option("--out", opt.out_dir, "output directory (default: output.dir, then $RSHE_OUT, then .)");
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--svg", opt.svg, "also write an SVG plot per report");
  auto* seed_opt = app.add_option("--seed", seed, "override noise.seed");

  const auto cmds = commands();
  std::string chosen;
  for (const auto& [name, entry] : cmds) {
    app.add_subcommand(name, entry.first)->callback([&chosen, name = name] { chosen = name; });
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (seed_opt->count() > 0) opt.seed = seed;

  try {
    RunConfig cfg = opt.config_path.empty() ? RunConfig{} : load_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    validate(cfg);
    const std::string dir = resolve_out_dir(opt, cfg);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, "output.dir: cannot create " + dir);
    const std::vector<ExperimentReport> reports = cmds.at(chosen).second(cfg, opt.threads);
    bool failed = false;
    for (const ExperimentReport& r : reports) {
      emit(r, dir, opt.svg, out);
      failed = failed || r.status() == Status::kFail;
    }
    return failed ? kExitNumerical : kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace rshe
