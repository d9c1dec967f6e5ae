// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rshe/experiments.hpp"
#include "rshe/properties.hpp"

namespace rshe {
namespace {

ExperimentConfig small_config(std::size_t paths) {
  ExperimentConfig c;
  c.scheme.grid = make_grid(16);
  c.scheme.noise.cutoff = 7;
  c.scheme.noise.lambda = 0.75;
  c.scheme.noise.master_seed = 11;
  c.scheme.h = 4e-3;
  c.scheme.T = 0.08;
  c.paths = paths;
  return c;
}

TEST(Stats, EstimateAndFit) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const Estimate e = estimate(v);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.se, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  const LinearFit f = fit_line(std::vector<double>{0, 1, 2, 3}, std::vector<double>{1, 3, 5, 7});
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.slope_se, 0.0, 1e-14);
  const Spread s = spread({3.0, 1.0, 2.0});
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.median, 2.0);
  EXPECT_EQ(s.max, 3.0);
}

TEST(Stats, ParallelMapIsOrderedAndPropagatesErrors) {
  const auto sq = parallel_map(100, 4, [](std::size_t i) { return static_cast<double>(i * i); });
  for (std::size_t i = 0; i < sq.size(); ++i) EXPECT_EQ(sq[i], static_cast<double>(i * i));
  EXPECT_THROW(parallel_map(10, 3,
                            [](std::size_t i) -> int {
                              if (i == 7) throw NumericalError("boom");
                              return 0;
                            }),
               NumericalError);
}

TEST(Report, CsvJsonAndStatus) {
  ExperimentReport r;
  r.name = "x";
  r.columns = {"a", "b"};
  r.add_row({1.0, 0.1});
  EXPECT_THROW(r.add_row({1.0}), ConfigError);
  EXPECT_EQ(to_csv(r), "a,b\n1,0.10000000000000001\n");
  r.check("soft", false, NAN, 1.0, {}, true);
  EXPECT_EQ(r.status(), Status::kWarn);
  EXPECT_TRUE(to_json(r)["verdicts"][0]["value"].is_null());
  r.check("hard", false, 1.0, 0.0);
  EXPECT_EQ(r.status(), Status::kFail);
  EXPECT_NE(to_svg(r).find("<svg"), std::string::npos);
}

TEST(Experiments, InitialConditions) {
  const GridSpec g = make_grid(16);
  for (const char* name : {"zero", "bump", "two_level"}) {
    EXPECT_TRUE(is_symmetric_nonincreasing(initial_condition(name, g), 0.0)) << name;
  }
  EXPECT_THROW(initial_condition("wavy", g), ConfigError);
}

TEST(Experiments, ContractionAndReflectionPassAtSmallScale) {
  const ExperimentConfig c = small_config(8);
  EXPECT_EQ(contraction_experiment(c).status(), Status::kPass);
  EXPECT_EQ(reflection_experiment(c).status(), Status::kPass);
  const ExperimentReport same = contraction_experiment(c, {.identical = true});
  EXPECT_EQ(same.status(), Status::kPass);
}

TEST(Experiments, ThreadCountDoesNotChangeResults) {
  ExperimentConfig a = small_config(12);
  ExperimentConfig b = a;
  b.threads = 4;
  EXPECT_EQ(to_csv(energy_experiment(a)), to_csv(energy_experiment(b)));
  EXPECT_EQ(to_csv(convergence_experiment(a, {.levels = 3})), to_csv(convergence_experiment(b, {.levels = 3})));
}

TEST(Experiments, ZeroNoiseConvergenceIsRoundOff) {
  ExperimentConfig c = small_config(2);
  c.scheme.noise.scale = 0.0;
  const ExperimentReport r = convergence_experiment(c, {.levels = 3});
  // Heat flow of the smooth start is exact at every step size.
  EXPECT_EQ(r.status(), Status::kPass);
  EXPECT_LE(r.summary["largest_difference"].get<double>(), 1e-10);
}

TEST(Experiments, ConfigErrors) {
  ExperimentConfig c = small_config(4);
  EXPECT_THROW(convergence_experiment(c, {.levels = 6}), ConfigError);
  c.paths = 0;
  EXPECT_THROW(contraction_experiment(c), ConfigError);
  ExperimentConfig s = small_config(4);
  s.scheme.noise.lambda = 1.2;
  EXPECT_THROW(smoothing_experiment(s), ConfigError);
  s.scheme.noise.lambda = 0.75;
  SmoothingOptions o;
  o.t_grid = {0.005};
  EXPECT_THROW(smoothing_experiment(s, o), ConfigError);
}

TEST(Experiments, SmoothingCeilingHolds) {
  ExperimentConfig c = small_config(20);
  c.initial = "zero";
  SmoothingOptions o;
  o.t_grid = {0.02, 0.04, 0.08};
  const ExperimentReport r = smoothing_experiment(c, o);
  EXPECT_EQ(r.verdicts.front().status, Status::kPass);
  EXPECT_EQ(r.rows.size(), 3u);
}

TEST(Experiments, BridgeAtSmallScale) {
  BridgeOptions o;
  o.pairs = 20;
  o.uniform_grid = 1 << 12;
  o.normal_samples = 20000;
  const ExperimentReport r = bridge_experiment(o);
  EXPECT_EQ(r.verdicts[0].status, Status::kPass);
  // Uniform case: W2^2 = 1/3 + 2/(3 n^2) on the quantile grid.
  const double n = 1 << 12;
  EXPECT_NEAR(r.summary["uniform_w2"].get<double>(), std::sqrt(1.0 / 3.0 + 2.0 / (3.0 * n * n)), 1e-13);
}

TEST(Properties, SuitesPassAtSmallScale) {
  const std::vector<int> sizes = {4, 16};
  EXPECT_EQ(rearrangement_suite(sizes, 200, 3).status(), Status::kPass);
  EXPECT_EQ(riesz_polya_suite(sizes, 50, 3).status(), Status::kPass);
  EXPECT_EQ(key_inequality_suite(16, 100, 3).status(), Status::kPass);
  EXPECT_EQ(heat_suite(3, 20).status(), Status::kPass);
}

}  // namespace
}  // namespace rshe
