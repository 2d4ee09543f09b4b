/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <limits>

#include "doctest.h"
#include "gasm/errors.hpp"
#include "gasm/grid.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace gasm;

TEST_SUITE("grid") {

TEST_CASE("flat layout is feature-major row-major") {
  auto g = GridGeometry::regular(2, 3, 4);
  CHECK(g.size() == 24);
  CHECK(g.spatial_size() == 12);
  CHECK(g.flat(0, 0, 0) == 0);
  CHECK(g.flat(0, 0, 3) == 3);
  CHECK(g.flat(0, 1, 0) == 4);
  CHECK(g.flat(1, 0, 0) == 12);
  CHECK(g.flat(1, 2, 3) == 23);
}

TEST_CASE("regular latitudes are equator-symmetric cell centers") {
  auto g = GridGeometry::regular(1, 4, 8);
  // 90 - (j + 1/2) * 45 for j = 0..3.
  CHECK(g.lat_values[0] == doctest::Approx(67.5));
  CHECK(g.lat_values[1] == doctest::Approx(22.5));
  CHECK(g.lat_values[2] == doctest::Approx(-22.5));
  CHECK(g.lat_values[3] == doctest::Approx(-67.5));
}

TEST_CASE("spanned latitudes form an inclusive north-to-south linspace") {
  auto g = GridGeometry::spanned(1, 5, 3, 60.0, -60.0);
  CHECK(g.lat_values.front() == doctest::Approx(60.0));
  CHECK(g.lat_values.back() == doctest::Approx(-60.0));
  CHECK(g.lat_values[2] == doctest::Approx(0.0));
  auto one = GridGeometry::spanned(1, 1, 3, 15.0, 15.0);
  CHECK(one.lat_values[0] == doctest::Approx(15.0));
}

TEST_CASE("geometry validation rejects bad shapes and orderings") {
  GridGeometry g;
  g.n_features = 0;
  g.n_lat = 1;
  g.n_lon = 1;
  g.lat_values = {0.0};
  CHECK_THROWS_AS(g.validate(), ParameterError);

  g = GridGeometry::regular(1, 2, 2);
  g.lat_values = {10.0};  // wrong count
  CHECK_THROWS_AS(g.validate(), DimensionError);

  g = GridGeometry::regular(1, 2, 2);
  g.lat_values = {-10.0, 10.0};  // increasing, must be strictly decreasing
  CHECK_THROWS_AS(g.validate(), ParameterError);

  g = GridGeometry::regular(1, 2, 2);
  g.lat_values = {10.0, 10.0};  // not strict
  CHECK_THROWS_AS(g.validate(), ParameterError);

  CHECK_NOTHROW(GridGeometry::regular(3, 7, 9).validate());
}

TEST_CASE("zeros produces a correctly shaped zero state") {
  auto s = GridState::zeros(GridGeometry::regular(2, 3, 5), 42);
  CHECK(s.values.size() == 30);
  CHECK(s.time_index == 42);
  for (double v : s.values) CHECK(v == 0.0);
}

TEST_CASE("feature spans alias the underlying storage") {
  auto s = GridState::zeros(GridGeometry::regular(2, 2, 2));
  s.feature(1)[3] = 7.0;
  CHECK(s.at(1, 1, 1) == 7.0);
  CHECK(s.values[7] == 7.0);
}

TEST_CASE("standardize and destandardize round trip") {
  auto g = GridGeometry::regular(2, 4, 6);
  auto s = testsup::random_state(g, 101, 3.0, 9);
  FeatureStats stats{{1.5, -2.0}, {0.7, 4.0}};
  auto z = standardize(s, stats);
  CHECK(z.time_index == 9);
  CHECK(z.at(0, 1, 2) == doctest::Approx((s.at(0, 1, 2) - 1.5) / 0.7));
  CHECK(z.at(1, 3, 5) == doctest::Approx((s.at(1, 3, 5) + 2.0) / 4.0));
  auto back = destandardize(z, stats);
  CHECK(testsup::max_abs_diff(back.values, s.values) < 1e-12);
}

TEST_CASE("standardize rejects bad stats") {
  auto s = GridState::zeros(GridGeometry::regular(2, 2, 2));
  CHECK_THROWS_AS(standardize(s, FeatureStats{{0.0}, {1.0}}), DimensionError);
  CHECK_THROWS_AS(standardize(s, FeatureStats{{0.0, 0.0}, {1.0, 0.0}}),
                  ParameterError);
  CHECK_THROWS_AS(standardize(s, FeatureStats{{0.0, 0.0}, {1.0, -2.0}}),
                  ParameterError);
}

TEST_CASE("latitude weights match the cosine definition and average to one") {
  for (int n_lat : {1, 3, 8, 45}) {
    auto g = GridGeometry::regular(1, n_lat, 4);
    auto w = latitude_weights(g);
    auto expected = oracle::latitude_weights(g);
    REQUIRE(w.size() == static_cast<std::size_t>(n_lat));
    for (int i = 0; i < n_lat; ++i)
      CHECK(w[static_cast<std::size_t>(i)] ==
            doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-12));
    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= n_lat;
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pole rows carry zero weight") {
  auto g = GridGeometry::spanned(1, 3, 4, 90.0, -90.0);
  auto w = latitude_weights(g);
  CHECK(w[0] == 0.0);
  CHECK(w[2] == 0.0);
  CHECK(w[1] == doctest::Approx(3.0));  // cos(0) / mean(0, 1, 0) = 1 / (1/3)
}

TEST_CASE("derived wind speed is the pointwise hypotenuse") {
  auto g = GridGeometry::regular(3, 4, 5);
  auto s = testsup::random_state(g, 7, 2.0, 3);
  auto speed = derived_wind_speed(s, 0, 2);
  CHECK(speed.geometry.n_features == 1);
  CHECK(speed.geometry.n_lat == 4);
  CHECK(speed.time_index == 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(speed.at(0, i, j) ==
            doctest::Approx(std::hypot(s.at(0, i, j), s.at(2, i, j))));
  CHECK_THROWS_AS(derived_wind_speed(s, 0, 3), DimensionError);
}

TEST_CASE("state blend hits both endpoints exactly") {
  auto g = GridGeometry::regular(1, 3, 3);
  auto a = testsup::random_state(g, 1);
  auto b = testsup::random_state(g, 2);
  auto at0 = state_blend(a, b, 0.0);
  auto at1 = state_blend(a, b, 1.0);
  CHECK(testsup::max_abs_diff(at0.values, a.values) == 0.0);
  CHECK(testsup::max_abs_diff(at1.values, b.values) == 0.0);
  auto mid = state_blend(a, b, 0.25);
  CHECK(mid.at(0, 1, 1) ==
        doctest::Approx(a.at(0, 1, 1) + 0.25 * (b.at(0, 1, 1) - a.at(0, 1, 1))));
  auto g2 = GridGeometry::regular(1, 3, 4);
  CHECK_THROWS_AS(state_blend(a, GridState::zeros(g2), 0.5), DimensionError);
}

TEST_CASE("extract feature copies one plane") {
  auto s = testsup::random_state(GridGeometry::regular(3, 2, 2), 5, 1.0, 11);
  auto f1 = extract_feature(s, 1);
  CHECK(f1.geometry.n_features == 1);
  CHECK(f1.time_index == 11);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(f1.at(0, i, j) == s.at(1, i, j));
  CHECK_THROWS_AS(extract_feature(s, 3), DimensionError);
}

TEST_CASE("all_finite detects NaN and infinity anywhere") {
  auto s = GridState::zeros(GridGeometry::regular(2, 2, 2));
  CHECK(all_finite(s));
  s.values[5] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(all_finite(s));
  s.values[5] = std::numeric_limits<double>::infinity();
  CHECK_FALSE(all_finite(s));
  s.values[5] = 1e308;
  CHECK(all_finite(s));
}

}  // TEST_SUITE
