/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "gasm/errors.hpp"
#include "gasm/metrics.hpp"
#include "gasm/rng.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace gasm;

TEST_SUITE("metrics") {

TEST_CASE("rmse of identical states is zero") {
  auto g = GridGeometry::regular(2, 4, 4);
  auto s = testsup::random_state(g, 1);
  auto w = latitude_weights(g);
  CHECK(rmse(s, s, w) == 0.0);
}

TEST_CASE("rmse reproduces a hand-computed uniform case") {
  auto g = GridGeometry::spanned(1, 1, 4, 0.0, 0.0);  // single equatorial row
  auto w = latitude_weights(g);
  REQUIRE(w[0] == doctest::Approx(1.0));
  auto est = GridState::zeros(g);
  auto truth = GridState::zeros(g);
  est.values = {1.0, -1.0, 3.0, 0.0};
  truth.values = {0.0, 0.0, 0.0, -1.0};
  // diffs 1, -1, 3, 1 -> mean square 3 -> sqrt(3).
  CHECK(rmse(est, truth, w) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("rmse averages the per-feature roots") {
  auto g = GridGeometry::spanned(2, 1, 2, 0.0, 0.0);
  auto w = latitude_weights(g);
  auto est = GridState::zeros(g);
  auto truth = GridState::zeros(g);
  // Feature 0 differs by 2 everywhere, feature 1 by 6: mean of roots is 4,
  // while a pooled root-mean-square would give sqrt(20) = 4.47.
  est.values = {2.0, 2.0, 6.0, 6.0};
  CHECK(rmse(est, truth, w) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("rmse matches the literal transcription on random fields") {
  for (int trial = 0; trial < 4; ++trial) {
    auto g = GridGeometry::regular(2 + trial % 2, 5, 6);
    auto est = testsup::random_state(g, 100 + trial, 3.0);
    auto truth = testsup::random_state(g, 200 + trial, 3.0);
    auto w = latitude_weights(g);
    CHECK(rmse(est, truth, w) ==
          doctest::Approx(oracle::weighted_rmse(est, truth, w)).epsilon(1e-13));
  }
}

TEST_CASE("acc is one for identical fields under uniform weights") {
  auto g = GridGeometry::regular(1, 3, 4);
  const std::vector<double> w(3, 1.0);  // uniform by construction
  auto s = testsup::random_state(g, 9);
  CHECK(acc(s, s, w) == doctest::Approx(1.0).epsilon(1e-13));
  auto neg = s;
  for (auto& v : neg.values) v = -v;
  CHECK(acc(neg, s, w) == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("symmetric acc is one for identical fields under any weights") {
  auto g = GridGeometry::regular(1, 5, 4);
  auto w = latitude_weights(g);
  auto s = testsup::random_state(g, 10);
  CHECK(acc(s, s, w, true) == doctest::Approx(1.0).epsilon(1e-13));
  // The default form is deliberately asymmetric: weighting only one norm
  // moves the score away from one when the weights are non-uniform.
  CHECK(acc(s, s, w, false) != doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("acc matches the literal transcription on random fields") {
  for (int trial = 0; trial < 4; ++trial) {
    auto g = GridGeometry::regular(2, 4, 7);
    auto est = testsup::random_state(g, 300 + trial, 2.0);
    auto truth = testsup::random_state(g, 400 + trial, 2.0);
    auto w = latitude_weights(g);
    for (bool symmetric : {false, true}) {
      CHECK(acc(est, truth, w, symmetric) ==
            doctest::Approx(oracle::weighted_acc(est, truth, w, symmetric))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("acc argument order matters in the default form") {
  auto g = GridGeometry::regular(1, 4, 4);
  auto a = testsup::random_state(g, 500, 1.0);
  auto b = testsup::random_state(g, 501, 5.0);
  auto w = latitude_weights(g);
  CHECK(acc(a, b, w) != doctest::Approx(acc(b, a, w)).epsilon(1e-9));
}

TEST_CASE("acc rejects zero-norm inputs") {
  auto g = GridGeometry::regular(1, 3, 3);
  auto z = GridState::zeros(g);
  auto s = testsup::random_state(g, 11);
  auto w = latitude_weights(g);
  CHECK_THROWS_AS(acc(z, s, w), UndefinedMetricError);
  CHECK_THROWS_AS(acc(s, z, w), UndefinedMetricError);
}

TEST_CASE("metric weight vectors must match the latitude count") {
  auto g = GridGeometry::regular(1, 4, 4);
  auto s = testsup::random_state(g, 12);
  std::vector<double> w(3, 1.0);
  CHECK_THROWS_AS(rmse(s, s, w), DimensionError);
  auto g2 = GridGeometry::regular(1, 4, 5);
  CHECK_THROWS_AS(rmse(s, GridState::zeros(g2), latitude_weights(g)), DimensionError);
}

TEST_CASE("crps of a single member is the absolute error") {
  std::vector<double> one{2.5};
  CHECK(crps(one, 1.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(crps(one, 2.5) == doctest::Approx(0.0));
}

TEST_CASE("crps energy form equals the exact piecewise integral") {
  RngStream rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_u64() % 12);
    std::vector<double> ens(static_cast<std::size_t>(m));
    for (double& v : ens) v = 3.0 * rng.next_normal();
    if (trial % 3 == 0 && m > 1) ens[1] = ens[0];  // duplicates are legal
    const double y = 3.0 * rng.next_normal();
    const double got = crps(ens, y);
    const double expected = oracle::crps_by_integration(ens, y);
    CHECK(got == doctest::Approx(expected).epsilon(1e-9));
    CHECK(got >= 0.0);
  }
}

TEST_CASE("crps is translation invariant and scales linearly") {
  std::vector<double> ens{0.2, -1.0, 0.7, 2.0};
  const double base = crps(ens, 0.5);
  std::vector<double> shifted(ens);
  for (double& v : shifted) v += 10.0;
  CHECK(crps(shifted, 10.5) == doctest::Approx(base).epsilon(1e-12));
  std::vector<double> scaled(ens);
  for (double& v : scaled) v *= 3.0;
  CHECK(crps(scaled, 1.5) == doctest::Approx(3.0 * base).epsilon(1e-12));
  CHECK_THROWS_AS(crps(std::vector<double>{}, 0.0), ParameterError);
}

TEST_CASE("trajectory crps averages the per-coordinate scores") {
  std::vector<std::vector<TrackPoint>> members{{{0, 0}}, {{2, 4}}};
  std::vector<TrackPoint> reference{{1, 1}};
  auto scores = trajectory_crps(members, reference);
  REQUIRE(scores.size() == 1);
  // lat ensemble {0, 2} vs 1 -> 0.5; lon ensemble {0, 4} vs 1 -> 1.0.
  CHECK(scores[0] == doctest::Approx(0.75).epsilon(1e-12));

  std::vector<std::vector<TrackPoint>> ragged{{{0, 0}}, {}};
  CHECK_THROWS_AS(trajectory_crps(ragged, reference), DimensionError);
}

TEST_CASE("metric series serialize sorted with a stable header") {
  MetricSeries series;
  series.add(2, "rmse", 0.5);
  series.add(1, "rmse", 0.25);
  series.add(1, "acc", 1.0);
  CHECK(series.to_csv() ==
        "time_index,metric_name,value\n"
        "1,acc,1\n"
        "1,rmse,0.25\n"
        "2,rmse,0.5\n");
}

TEST_CASE("truncate_from drops rows at and after the cutoff") {
  MetricSeries series;
  for (int t = 1; t <= 5; ++t) series.add(t, "rmse", t * 1.0);
  series.truncate_from(3);
  CHECK(series.rows().size() == 2);
  for (const auto& row : series.rows()) CHECK(row.time_index < 3);
}

TEST_CASE("metric series round trip through a file") {
  auto dir = std::filesystem::temp_directory_path() / "gasm_metrics_test";
  std::filesystem::create_directories(dir);
  MetricSeries series;
  series.add(1, "rmse", 0.1);
  series.add(1, "acc", 1.0 / 3.0);
  series.add(7, "rmse_baseline", 1e-17);
  series.write_csv(dir / "m.csv");
  auto back = MetricSeries::from_csv_file(dir / "m.csv");
  CHECK(back.to_csv() == series.to_csv());
  REQUIRE(back.rows().size() == 3);
  // Rows come back sorted by (time, name); values survive exactly thanks to
  // shortest-round-trip formatting.
  CHECK(back.rows()[0].value == 1.0 / 3.0);
  CHECK(back.rows()[1].value == 0.1);
  CHECK(back.rows()[2].value == 1e-17);
  CHECK_THROWS_AS(MetricSeries::from_csv_file(dir / "nope.csv"), IoError);
}

TEST_CASE("format_double emits shortest forms that parse back exactly") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.5) == "-0.5");
  for (double v : {1.0 / 3.0, 2.0 / 3.0, 1e300, -1e-300, 0.1 + 0.2,
                   123456789.123456789, 5e-324}) {
    // strtod, not stod: stod raises out_of_range on subnormal input.
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

}  // TEST_SUITE
