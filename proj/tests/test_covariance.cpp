/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <vector>

#include "doctest.h"
#include "gasm/covariance.hpp"
#include "gasm/errors.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace gasm;

namespace {
// Dense C = q B B^T for oracle-side comparisons.
oracle::Dense dense_covariance(const GridGeometry& g, const BackgroundCovariance& cov) {
  auto b = oracle::convolution_matrix(g, cov.kernel, false);
  auto c = oracle::matmul(b, oracle::transpose(b));
  for (double& v : c.a) v *= cov.q;
  return c;
}
}  // namespace

TEST_SUITE("covariance") {

TEST_CASE("default scale follows the inverse sum of squared weights") {
  auto k1 = GaussianKernel::gaussian(1, 8.0);
  CHECK(default_q(k1) == doctest::Approx(0.5).epsilon(1e-15));

  for (int k : {2, 3, 4}) {
    auto ker = GaussianKernel::gaussian(k, 8.0);
    double ssq = 0.0;
    for (double w : ker.weights) ssq += w * w;
    CHECK(default_q(ker) == doctest::Approx(0.5 / ssq).epsilon(1e-14));
    auto cov = BackgroundCovariance::with_default_q(ker);
    CHECK(cov.q == doctest::Approx(default_q(ker)));
  }
}

TEST_CASE("default scale puts one half on the interior covariance diagonal") {
  auto g = GridGeometry::regular(1, 9, 9);
  auto cov = BackgroundCovariance::with_default_q(GaussianKernel::gaussian(3, 8.0));
  auto e = GridState::zeros(g);
  e.at(0, 4, 4) = 1.0;
  auto ce = apply_C(cov, e);
  CHECK(ce.at(0, 4, 4) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("apply_C matches the dense q B Bt oracle") {
  struct Case {
    int n_feat, n_lat, n_lon, k;
    double sigma2, q;
  };
  for (const auto& c : std::vector<Case>{{1, 6, 7, 3, 8.0, 0.5},
                                         {2, 5, 5, 2, 0.25, 1.7},
                                         {1, 4, 9, 4, 8.0, 0.02},
                                         {1, 1, 8, 3, 2.0, 1.0}}) {
    CAPTURE(c.k);
    CAPTURE(c.n_lat);
    auto g = GridGeometry::regular(c.n_feat, c.n_lat, c.n_lon);
    BackgroundCovariance cov{GaussianKernel::gaussian(c.k, c.sigma2), c.q};
    auto v = testsup::random_state(g, 400 + c.k, 2.0, 6);
    auto got = apply_C(cov, v);
    CHECK(got.time_index == 6);
    auto expected = oracle::apply(dense_covariance(g, cov), v.values);
    CHECK(testsup::max_abs_diff(got.values, expected) < 1e-12);
  }
}

TEST_CASE("the covariance operator is symmetric positive semidefinite") {
  auto g = GridGeometry::regular(1, 7, 7);
  BackgroundCovariance cov{GaussianKernel::gaussian(3, 8.0), 0.9};
  for (int trial = 0; trial < 5; ++trial) {
    auto u = testsup::random_state(g, 50 + trial);
    auto v = testsup::random_state(g, 90 + trial);
    const double cu_v = testsup::dot(apply_C(cov, u).values, v.values);
    const double u_cv = testsup::dot(u.values, apply_C(cov, v).values);
    CHECK(cu_v == doctest::Approx(u_cv).epsilon(1e-12));
    CHECK(testsup::dot(apply_C(cov, u).values, u.values) >= -1e-12);
  }
}

TEST_CASE("innovation diagonal matches the dense assembly on awkward grids") {
  struct Case {
    int n_feat, n_lat, n_lon, k, stride, lat_off, lon_off;
  };
  // Non-divisible shapes and nonzero offsets exercise every boundary class.
  for (const auto& c : std::vector<Case>{{1, 7, 9, 2, 2, 0, 0},
                                         {1, 7, 9, 2, 2, 1, 1},
                                         {2, 6, 10, 3, 3, 1, 2},
                                         {1, 5, 5, 3, 2, 0, 1},
                                         {1, 8, 8, 4, 4, 2, 3}}) {
    CAPTURE(c.k);
    CAPTURE(c.stride);
    CAPTURE(c.lat_off);
    auto g = GridGeometry::regular(c.n_feat, c.n_lat, c.n_lon);
    BackgroundCovariance cov{GaussianKernel::gaussian(c.k, 8.0), 0.8};
    auto op = ThinningOperator::make(g, c.stride, c.lat_off, c.lon_off);
    const double r = 0.03;
    auto gain = build_gain(cov, op, r);
    REQUIRE(gain.innovation_diag.size() == static_cast<std::size_t>(op.obs_size()));

    auto h = oracle::thinning_matrix(op);
    auto hc = oracle::matmul(h, dense_covariance(g, cov));
    auto hcht = oracle::matmul(hc, oracle::transpose(h));
    for (int i = 0; i < hcht.rows; ++i)
      CHECK(gain.innovation_diag[static_cast<std::size_t>(i)] ==
            doctest::Approx(hcht.at(i, i) + r).epsilon(1e-12));
  }
}

TEST_CASE("worked one-dimensional example with an equal-weight stencil") {
  // Five cells in a single row, kernel side 3 with all weights equal, q = 1,
  // observations at cells 0 and 3. Replication padding gives the first
  // smoothed cell (2 x0 + x1) / 3, and the innovation diagonal entries are
  // ||B^T H^T e_i||^2 = 5/9 and 1/3.
  auto g = GridGeometry::regular(1, 1, 5);
  auto ker = GaussianKernel::from_weights(3, std::vector<double>(9, 1.0));
  BackgroundCovariance cov{ker, 1.0};
  auto op = ThinningOperator::make(g, 3);
  REQUIRE(op.obs_size() == 2);

  auto x = testsup::random_state(g, 123);
  auto smoothed = convolve(x, ker);
  CHECK(smoothed.values[0] ==
        doctest::Approx((2.0 * x.values[0] + x.values[1]) / 3.0).epsilon(1e-13));

  const double r = 0.25;
  auto gain = build_gain(cov, op, r);
  CHECK(gain.innovation_diag[0] == doctest::Approx(5.0 / 9.0 + r).epsilon(1e-13));
  CHECK(gain.innovation_diag[1] == doctest::Approx(1.0 / 3.0 + r).epsilon(1e-13));

  auto report = verify_diagonal(cov, op);
  CHECK(report.exactly_diagonal);
}

TEST_CASE("gain application equals the dense structured formula") {
  struct Case {
    int n_feat, n_lat, n_lon, k, stride;
    double q, r;
  };
  for (const auto& c : std::vector<Case>{{1, 6, 8, 2, 2, 0.5, 0.01},
                                         {2, 6, 6, 3, 3, 1.3, 0.1},
                                         {1, 5, 7, 3, 2, 0.7, 0.05}}) {
    CAPTURE(c.k);
    CAPTURE(c.stride);
    auto g = GridGeometry::regular(c.n_feat, c.n_lat, c.n_lon);
    BackgroundCovariance cov{GaussianKernel::gaussian(c.k, 8.0), c.q};
    auto op = ThinningOperator::make(g, c.stride);
    auto gain = build_gain(cov, op, c.r);

    auto innovation =
        testsup::random_vector(static_cast<std::size_t>(op.obs_size()), 600 + c.k);
    auto got = apply_gain(gain, innovation, 12);
    CHECK(got.time_index == 12);

    // Dense K v = C H^T diag(H C H^T + r)^{-1} v, transcribed directly.
    auto h = oracle::thinning_matrix(op);
    auto cm = dense_covariance(g, cov);
    auto hcht = oracle::matmul(oracle::matmul(h, cm), oracle::transpose(h));
    std::vector<double> scaled(innovation.begin(), innovation.end());
    for (int i = 0; i < hcht.rows; ++i)
      scaled[static_cast<std::size_t>(i)] /= (hcht.at(i, i) + c.r);
    auto expected =
        oracle::apply(oracle::matmul(cm, oracle::transpose(h)), scaled);
    CHECK(testsup::max_abs_diff(got.values, expected) < 1e-12);
  }
}

TEST_CASE("kernel side equal to stride makes the innovation matrix diagonal") {
  for (int stride : {2, 3, 4}) {
    CAPTURE(stride);
    auto g = GridGeometry::regular(1, 12, 12);
    auto cov =
        BackgroundCovariance::with_default_q(GaussianKernel::gaussian(stride, 8.0));
    auto op = ThinningOperator::make(g, stride);
    auto report = verify_diagonal(cov, op);
    CHECK(report.exactly_diagonal);
    CHECK(report.max_off_diagonal == 0.0);
    CHECK(report.dimension == op.obs_size());

    // Dense confirmation that every off-diagonal entry vanishes.
    auto h = oracle::thinning_matrix(op);
    auto hcht =
        oracle::matmul(oracle::matmul(h, dense_covariance(g, cov)), oracle::transpose(h));
    double max_off = 0.0;
    for (int i = 0; i < hcht.rows; ++i)
      for (int j = 0; j < hcht.cols; ++j)
        if (i != j) max_off = std::max(max_off, std::abs(hcht.at(i, j)));
    CHECK(max_off == 0.0);
  }
}

TEST_CASE("mismatched kernel and stride produce off-diagonal mass") {
  auto g = GridGeometry::regular(1, 12, 12);
  auto cov = BackgroundCovariance::with_default_q(GaussianKernel::gaussian(3, 8.0));
  auto op = ThinningOperator::make(g, 2);
  auto report = verify_diagonal(cov, op);
  CHECK_FALSE(report.exactly_diagonal);
  CHECK(report.max_off_diagonal > 0.0);
}

TEST_CASE("diagonality audit refuses oversized grids") {
  auto g = GridGeometry::regular(1, 65, 65);
  auto cov = BackgroundCovariance::with_default_q(GaussianKernel::gaussian(2, 8.0));
  auto op = ThinningOperator::make(g, 2);
  CHECK_THROWS_AS(verify_diagonal(cov, op), CapacityError);
}

TEST_CASE("gain construction rejects invalid noise and covariance scales") {
  auto g = GridGeometry::regular(1, 4, 4);
  BackgroundCovariance cov{GaussianKernel::gaussian(1, 8.0), 0.5};
  auto op = ThinningOperator::make(g, 1);
  // Zero observation noise is allowed: the diagonal stays at q > 0.
  CHECK_NOTHROW(build_gain(cov, op, 0.0));
  CHECK_THROWS_AS(build_gain(cov, op, -0.5), ParameterError);
  BackgroundCovariance zero_q{GaussianKernel::gaussian(1, 8.0), 0.0};
  CHECK_THROWS_AS(build_gain(zero_q, op, 0.01), ParameterError);
  BackgroundCovariance neg_q{GaussianKernel::gaussian(1, 8.0), -1.0};
  CHECK_THROWS_AS(build_gain(neg_q, op, 0.01), ParameterError);
}

TEST_CASE("apply_gain validates the innovation length") {
  auto g = GridGeometry::regular(1, 4, 4);
  auto cov = BackgroundCovariance::with_default_q(GaussianKernel::gaussian(2, 8.0));
  auto op = ThinningOperator::make(g, 2);
  auto gain = build_gain(cov, op, 0.01);
  std::vector<double> short_vec(3, 1.0);
  CHECK_THROWS_AS(apply_gain(gain, short_vec), DimensionError);
}

}  // TEST_SUITE
