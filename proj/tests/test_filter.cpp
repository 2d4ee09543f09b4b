/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "doctest.h"
#include "gasm/errors.hpp"
#include "gasm/filter.hpp"
#include "gasm/rng.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace gasm;

namespace {
struct Bench {
  GridGeometry geometry;
  std::shared_ptr<const Dynamics> dynamics;
  ThinningOperator op;
  GainApplicator gain;
};

Bench l96_bench(int n, int stride, double r, double sigma2 = 8.0) {
  Bench b{Lorenz96::geometry(n),
          std::make_shared<Lorenz96>(Lorenz96Config{.n = n}),
          {},
          {}};
  b.op = ThinningOperator::make(b.geometry, stride);
  auto cov =
      BackgroundCovariance::with_default_q(GaussianKernel::gaussian(stride, sigma2));
  b.gain = build_gain(cov, b.op, r);
  return b;
}

std::vector<ObservationBatch> synth_obs(const Bench& b, const GridState& x0,
                                        int horizon, double r, std::uint64_t seed) {
  std::vector<ObservationBatch> obs;
  auto x = x0;
  for (int t = 0; t < horizon; ++t) {
    x = b.dynamics->step(x);
    obs.push_back(observe(x, b.op, r, seed));
  }
  return obs;
}
}  // namespace

TEST_SUITE("filter") {

TEST_CASE("assimilate_step requires consecutively indexed observations") {
  auto b = l96_bench(8, 2, 0.01);
  auto x = testsup::random_state(b.geometry, 1, 2.0, 5);
  ObservationBatch y{std::vector<double>(static_cast<std::size_t>(b.op.obs_size()), 0.0),
                     7, 0.01};
  CHECK_THROWS_AS(assimilate_step(*b.dynamics, b.gain, x, y), SequencingError);
  y.time_index = 5;
  CHECK_THROWS_AS(assimilate_step(*b.dynamics, b.gain, x, y), SequencingError);
}

TEST_CASE("a zero innovation leaves the forecast untouched") {
  auto b = l96_bench(8, 2, 0.01);
  auto x = testsup::random_state(b.geometry, 2, 2.0, 0);
  auto forecast = b.dynamics->step(x);
  ObservationBatch y{apply_H(forecast, b.op), 1, 0.01};
  auto [f, a] = assimilate_step(*b.dynamics, b.gain, x, y);
  CHECK(testsup::max_abs_diff(f.values, forecast.values) == 0.0);
  CHECK(testsup::max_abs_diff(a.values, forecast.values) == 0.0);
  CHECK(a.time_index == 1);
}

TEST_CASE("one cycle matches the dense recursion formula") {
  for (auto [stride, n] : std::vector<std::pair<int, int>>{{2, 8}, {3, 9}, {1, 6}}) {
    CAPTURE(stride);
    auto b = l96_bench(n, stride, 0.05);
    auto x = testsup::random_state(b.geometry, 3 + stride, 2.0, 0);
    auto truth_next = b.dynamics->step(x);
    auto y = observe(truth_next, b.op, 0.05, 77);

    auto [f, a] = assimilate_step(*b.dynamics, b.gain, x, y);

    // Dense transcription: analysis = forecast + K (y - H forecast) with
    // K = C H^T diag(H C H^T + r)^{-1}.
    auto h = oracle::thinning_matrix(b.op);
    auto bm = oracle::convolution_matrix(b.geometry, b.gain.covariance.kernel, false);
    auto cm = oracle::matmul(bm, oracle::transpose(bm));
    for (double& v : cm.a) v *= b.gain.covariance.q;
    auto hcht = oracle::matmul(oracle::matmul(h, cm), oracle::transpose(h));
    auto hf = oracle::apply(h, f.values);
    std::vector<double> innov(hf.size());
    for (std::size_t i = 0; i < hf.size(); ++i)
      innov[i] = (y.values[i] - hf[i]) / (hcht.at(static_cast<int>(i),
                                                  static_cast<int>(i)) +
                                          0.05);
    auto incr = oracle::apply(oracle::matmul(cm, oracle::transpose(h)), innov);
    std::vector<double> expected(f.values);
    for (std::size_t i = 0; i < expected.size(); ++i) expected[i] += incr[i];
    CHECK(testsup::max_abs_diff(a.values, expected) < 1e-10);
  }
}

TEST_CASE("a near-certain observation pulls the analysis onto it") {
  // Dense observations, unit kernel, tiny noise: the gain approaches the
  // identity and the analysis approaches the observation vector.
  auto g = DiagonalLinear::geometry(6);
  auto dynamics = std::make_shared<DiagonalLinear>(DiagonalLinearConfig{.dim = 6, .scale = 1.0});
  auto op = ThinningOperator::make(g, 1);
  auto cov = BackgroundCovariance::with_default_q(GaussianKernel::gaussian(1, 8.0));
  auto gain = build_gain(cov, op, 1e-13);
  auto x = testsup::random_state(g, 4, 1.0, 0);
  auto y_values = testsup::random_vector(6, 5, 2.0);
  ObservationBatch y{y_values, 1, 1e-13};
  auto [f, a] = assimilate_step(*dynamics, gain, x, y);
  CHECK(testsup::max_abs_diff(a.values, y_values) < 1e-10);
}

TEST_CASE("run_filter over one observation equals one assimilate_step") {
  auto b = l96_bench(10, 2, 0.02);
  auto x0 = testsup::random_state(b.geometry, 6, 2.0, 0);
  auto obs = synth_obs(b, x0, 1, 0.02, 11);
  auto [f, a] = assimilate_step(*b.dynamics, b.gain, x0, obs[0]);
  FilterConfig cfg{b.dynamics, b.gain, x0, 0, std::nullopt, nullptr, true, true};
  auto traj = run_filter(cfg, obs);
  REQUIRE(traj.analyses.size() == 1);
  REQUIRE(traj.forecasts.size() == 1);
  CHECK_FALSE(traj.diverged_at.has_value());
  CHECK(testsup::max_abs_diff(traj.analyses[0].values, a.values) == 0.0);
  CHECK(testsup::max_abs_diff(traj.forecasts[0].values, f.values) == 0.0);
}

TEST_CASE("run_filter advances time indices consecutively") {
  auto b = l96_bench(8, 2, 0.02);
  auto x0 = testsup::random_state(b.geometry, 7, 2.0, 10);
  std::vector<ObservationBatch> obs;
  auto x = x0;
  for (int t = 0; t < 5; ++t) {
    x = b.dynamics->step(x);
    obs.push_back(observe(x, b.op, 0.02, 9));
  }
  FilterConfig cfg{b.dynamics, b.gain, x0, 0, std::nullopt, nullptr, true, false};
  auto traj = run_filter(cfg, obs);
  REQUIRE(traj.analyses.size() == 5);
  for (int t = 0; t < 5; ++t) CHECK(traj.analyses[static_cast<std::size_t>(t)].time_index == 11 + t);
  CHECK(traj.forecasts.empty());
}

TEST_CASE("the horizon limits how many observations are consumed") {
  auto b = l96_bench(8, 2, 0.02);
  auto x0 = testsup::random_state(b.geometry, 8, 2.0, 0);
  auto obs = synth_obs(b, x0, 6, 0.02, 3);
  FilterConfig cfg{b.dynamics, b.gain, x0, 4, std::nullopt, nullptr, true, false};
  auto traj = run_filter(cfg, obs);
  CHECK(traj.analyses.size() == 4);
}

TEST_CASE("gapped or reordered observations raise a sequencing error") {
  auto b = l96_bench(8, 2, 0.02);
  auto x0 = testsup::random_state(b.geometry, 9, 2.0, 0);
  auto obs = synth_obs(b, x0, 3, 0.02, 4);
  obs[1].time_index = 5;  // gap
  FilterConfig cfg{b.dynamics, b.gain, x0, 0, std::nullopt, nullptr, true, false};
  CHECK_THROWS_AS(run_filter(cfg, obs), SequencingError);
}

TEST_CASE("twin filters with identical dynamics produce identical trajectories") {
  auto b = l96_bench(8, 2, 0.02);
  auto x0 = testsup::random_state(b.geometry, 10, 2.0, 0);
  auto obs = synth_obs(b, x0, 10, 0.02, 5);
  FilterConfig cfg{b.dynamics, b.gain, x0, 0, std::nullopt, nullptr, true, false};
  auto t1 = run_filter(cfg, obs);
  auto t2 = run_filter(cfg, obs);
  REQUIRE(t1.analyses.size() == t2.analyses.size());
  for (std::size_t i = 0; i < t1.analyses.size(); ++i)
    CHECK(testsup::max_abs_diff(t1.analyses[i].values, t2.analyses[i].values) == 0.0);
}

TEST_CASE("assimilation tracks a chaotic truth better than free running") {
  // Twin experiment: truth and filter share the model; the filter sees noisy
  // observations of every coordinate. The free run from the same (slightly
  // off) initial state loses the truth, the filter does not.
  auto b = l96_bench(12, 1, 1e-4);
  auto truth0 = GridState::zeros(b.geometry);
  for (auto& v : truth0.values) v = 8.0;
  truth0.values[3] += 0.02;
  for (int t = 0; t < 300; ++t) truth0 = b.dynamics->step(truth0);
  truth0.time_index = 0;

  std::vector<GridState> truth;
  std::vector<ObservationBatch> obs;
  auto x = truth0;
  for (int t = 0; t < 120; ++t) {
    x = b.dynamics->step(x);
    truth.push_back(x);
    obs.push_back(observe(
        x, b.op, 1e-4,
        RngStream::split(21, RngPurpose::ObserveNoise, x.time_index).next_u64()));
  }

  auto init = truth0;
  for (auto& v : init.values) v += 0.5;  // imperfect initial condition
  FilterConfig cfg{b.dynamics, b.gain, init, 0, std::nullopt, nullptr, true, false};
  auto traj = run_filter(cfg, obs);
  REQUIRE(traj.analyses.size() == 120);

  auto free_run = init;
  double filter_err = 0.0, free_err = 0.0;
  for (int t = 0; t < 120; ++t) {
    free_run = b.dynamics->step(free_run);
    if (t >= 60) {
      std::vector<double> d1(truth[static_cast<std::size_t>(t)].values);
      for (std::size_t i = 0; i < d1.size(); ++i) {
        filter_err += std::abs(traj.analyses[static_cast<std::size_t>(t)].values[i] - d1[i]);
        free_err += std::abs(free_run.values[i] - d1[i]);
      }
    }
  }
  CHECK(filter_err * 5.0 < free_err);
}

TEST_CASE("feature ranges capture per-feature extremes") {
  auto g = GridGeometry::regular(2, 2, 3);
  auto s = GridState::zeros(g);
  s.at(0, 0, 0) = -4.0;
  s.at(0, 1, 2) = 9.0;
  s.at(1, 0, 1) = 2.0;
  s.at(1, 1, 1) = -1.0;
  auto range = FeatureRange::of(s);
  REQUIRE(range.min.size() == 2);
  CHECK(range.min[0] == -4.0);
  CHECK(range.max[0] == 9.0);
  CHECK(range.min[1] == -1.0);
  CHECK(range.max[1] == 2.0);
}

TEST_CASE("divergence detection widens the range by ten percent strictly") {
  auto g = GridGeometry::regular(1, 1, 4);
  auto s = GridState::zeros(g);
  std::vector<double> mn{-2.0};
  std::vector<double> mx{10.0};

  s.values = {0.0, -2.2, 11.0, 5.0};  // exactly on both widened bounds
  auto res = divergence_detect(s, mn, mx);
  CHECK_FALSE(res.any);

  s.values = {0.0, -2.2000001, 0.0, 0.0};
  res = divergence_detect(s, mn, mx);
  CHECK(res.any);
  CHECK(res.flagged == 1);

  s.values = {11.0001, -2.2000001, 0.0, 0.0};
  res = divergence_detect(s, mn, mx);
  CHECK(res.flagged == 2);

  // A negative maximum shrinks toward zero: max -1 allows up to -0.9.
  std::vector<double> mn2{-3.0};
  std::vector<double> mx2{-1.0};
  s.values = {-0.95, -1.0, -2.0, -3.25};
  res = divergence_detect(s, mn2, mx2);
  CHECK_FALSE(res.any);
  s.values = {-0.89, -1.0, -2.0, -3.35};
  res = divergence_detect(s, mn2, mx2);
  CHECK(res.flagged == 2);

  s.values = {std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0, 0.0};
  res = divergence_detect(s, mn, mx);
  CHECK(res.any);
}

TEST_CASE("the built-in range check halts the run and excludes the flagged cycle") {
  // Linear growth dynamics walk the state out of a static admissible range.
  auto g = DiagonalLinear::geometry(3);
  auto dynamics = std::make_shared<DiagonalLinear>(DiagonalLinearConfig{.dim = 3, .scale = 2.0});
  auto op = ThinningOperator::make(g, 1);
  auto cov = BackgroundCovariance::with_default_q(GaussianKernel::gaussian(1, 8.0));
  auto gain = build_gain(cov, op, 1e6);  // negligible gain: near-free run

  auto x0 = GridState::zeros(g);
  for (auto& v : x0.values) v = 1.0;

  std::vector<ObservationBatch> obs;
  for (int t = 1; t <= 6; ++t)
    obs.push_back({std::vector<double>(3, 0.0), t, 1e6});

  FeatureRange range{{0.0}, {5.0}};  // widened max 5.5: 2 -> 4 -> 8 trips at t = 3
  FilterConfig cfg{dynamics, gain, x0, 0, range, nullptr, true, false};
  auto traj = run_filter(cfg, obs);
  REQUIRE(traj.diverged_at.has_value());
  CHECK(*traj.diverged_at == 3);
  CHECK(traj.analyses.size() == 2);  // cycles 1 and 2 kept, cycle 3 excluded
  CHECK(traj.analyses.back().time_index == 2);
}

TEST_CASE("a sink veto halts the run at the vetoed cycle") {
  auto b = l96_bench(8, 2, 0.02);
  auto x0 = testsup::random_state(b.geometry, 12, 2.0, 0);
  auto obs = synth_obs(b, x0, 5, 0.02, 6);
  FilterConfig cfg{b.dynamics, b.gain, x0, 0, std::nullopt,
                   [](std::int64_t t, const GridState&, const GridState&) {
                     return t < 3;
                   },
                   true, false};
  auto traj = run_filter(cfg, obs);
  REQUIRE(traj.diverged_at.has_value());
  CHECK(*traj.diverged_at == 3);
  CHECK(traj.analyses.size() == 2);
}

TEST_CASE("a dynamics blowup is reported as divergence, not an exception") {
  auto g = DiagonalLinear::geometry(2);
  auto dynamics = std::make_shared<DiagonalLinear>(DiagonalLinearConfig{.dim = 2, .scale = 1e200});
  auto op = ThinningOperator::make(g, 1);
  auto cov = BackgroundCovariance::with_default_q(GaussianKernel::gaussian(1, 8.0));
  auto gain = build_gain(cov, op, 1e9);
  auto x0 = GridState::zeros(g);
  for (auto& v : x0.values) v = 1.0;
  std::vector<ObservationBatch> obs;
  for (int t = 1; t <= 4; ++t) obs.push_back({std::vector<double>(2, 0.0), t, 1e9});
  FilterConfig cfg{dynamics, gain, x0, 0, std::nullopt, nullptr, true, false};
  auto traj = run_filter(cfg, obs);
  REQUIRE(traj.diverged_at.has_value());
  // 1e200 -> 1e400 overflows inside the second step.
  CHECK(*traj.diverged_at == 2);
  CHECK(traj.analyses.size() == 1);
}

}  // TEST_SUITE
