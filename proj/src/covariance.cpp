/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/covariance.hpp"

#include <map>
#include <string>
#include <utility>

#include "gasm/errors.hpp"

namespace gasm {

namespace {

/// Boundary class of an index along one axis: indices whose kernel footprint
/// is clamped keep their identity, everything else collapses to one interior
/// class. m leading indices clamp at the low edge and k - 1 - m at the high
/// edge for a side-k kernel.
int axis_class(int i, int n, int k) {
  const int m = k / 2;
  if (i < m) return i;                       // low-edge classes: 0 .. m-1
  if (i > n - 1 - (k - 1 - m)) return -(n - i);  // high-edge classes: -1 .. -(k-1-m)
  return n;  // interior sentinel
}

}  // namespace

double default_q(const GaussianKernel& kernel) {
  double sum_sq = 0.0;
  for (double w : kernel.weights) sum_sq += w * w;
  if (!(sum_sq > 0.0)) throw ParameterError("kernel weights must not all vanish");
  return 0.5 / sum_sq;
}

BackgroundCovariance BackgroundCovariance::with_default_q(
    const GaussianKernel& kernel) {
  return BackgroundCovariance{kernel, default_q(kernel)};
}

GridState apply_C(const BackgroundCovariance& cov, const GridState& v) {
  if (!(cov.q > 0.0)) throw ParameterError("covariance scale q must be positive");
  GridState out = convolve(convolve_adjoint(v, cov.kernel), cov.kernel);
  for (double& x : out.values) x *= cov.q;
  return out;
}

GainApplicator build_gain(const BackgroundCovariance& cov,
                          const ThinningOperator& op, double r) {
  if (!(r >= 0.0)) throw ParameterError("noise variance must be nonnegative");
  if (!(cov.q > 0.0)) throw ParameterError("covariance scale q must be positive");
  if (op.geometry.n_features < 1) throw ParameterError("empty geometry");

  // One spatial block suffices: C acts identically on each feature plane.
  GridGeometry spatial = op.geometry;
  spatial.n_features = 1;

  const int nlo = op.obs_lat_count();
  const int nlo2 = op.obs_lon_count();
  const int k = cov.kernel.size;

  std::map<std::pair<int, int>, double> cache;
  std::vector<double> spatial_diag(static_cast<std::size_t>(nlo) * nlo2);
  for (int i = 0; i < nlo; ++i) {
    const int lat = op.lat_offset + i * op.stride;
    for (int j = 0; j < nlo2; ++j) {
      const int lon = op.lon_offset + j * op.stride;
      const std::pair<int, int> key{axis_class(lat, op.geometry.n_lat, k),
                                    axis_class(lon, op.geometry.n_lon, k)};
      auto it = cache.find(key);
      if (it == cache.end()) {
        GridState impulse = GridState::zeros(spatial);
        impulse.at(0, lat, lon) = 1.0;
        const GridState bt = convolve_adjoint(impulse, cov.kernel);
        double norm_sq = 0.0;
        for (double x : bt.values) norm_sq += x * x;
        it = cache.emplace(key, cov.q * norm_sq).first;
      }
      spatial_diag[static_cast<std::size_t>(i) * nlo2 + j] = it->second;
    }
  }

  GainApplicator gain;
  gain.covariance = cov;
  gain.op = op;
  gain.r = r;
  gain.innovation_diag.resize(static_cast<std::size_t>(op.obs_size()));
  for (int f = 0; f < op.geometry.n_features; ++f) {
    const std::size_t base = static_cast<std::size_t>(f) * nlo * nlo2;
    for (std::size_t s = 0; s < spatial_diag.size(); ++s) {
      const double d = spatial_diag[s] + r;
      if (!(d > 0.0)) {
        throw SingularGainError("nonpositive innovation diagonal entry " +
                                std::to_string(d));
      }
      gain.innovation_diag[base + s] = d;
    }
  }
  return gain;
}

GridState apply_gain(const GainApplicator& gain, std::span<const double> innovation,
                     std::int64_t time_index) {
  if (innovation.size() != gain.innovation_diag.size()) {
    throw DimensionError("innovation length does not match gain");
  }
  std::vector<double> scaled(innovation.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    scaled[i] = innovation[i] / gain.innovation_diag[i];
  }
  const GridState spread = apply_H_transpose(scaled, gain.op, time_index);
  return apply_C(gain.covariance, spread);
}

DiagonalityReport verify_diagonal(const BackgroundCovariance& cov,
                                  const ThinningOperator& op) {
  if (op.geometry.n_lat > 64 || op.geometry.n_lon > 64) {
    throw CapacityError("verify_diagonal supports spatial grids up to 64 x 64");
  }
  GridGeometry spatial = op.geometry;
  spatial.n_features = 1;
  ThinningOperator sp_op =
      ThinningOperator::make(spatial, op.stride, op.lat_offset, op.lon_offset);

  const std::int64_t d = sp_op.obs_size();
  DiagonalityReport report;
  report.dimension = d;
  report.exactly_diagonal = true;
  for (std::int64_t col = 0; col < d; ++col) {
    std::vector<double> e(static_cast<std::size_t>(d), 0.0);
    e[static_cast<std::size_t>(col)] = 1.0;
    const GridState column = apply_C(cov, apply_H_transpose(e, sp_op));
    const std::vector<double> sampled = apply_H(column, sp_op);
    for (std::int64_t row = 0; row < d; ++row) {
      if (row == col) continue;
      const double v = sampled[static_cast<std::size_t>(row)];
      if (v != 0.0) report.exactly_diagonal = false;
      const double mag = v < 0.0 ? -v : v;
      if (mag > report.max_off_diagonal) report.max_off_diagonal = mag;
    }
  }
  return report;
}

}  // namespace gasm
