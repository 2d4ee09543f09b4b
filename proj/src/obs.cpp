/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/obs.hpp"

#include <cmath>
#include <string>

#include "gasm/errors.hpp"
#include "gasm/rng.hpp"

namespace gasm {

ThinningOperator ThinningOperator::make(const GridGeometry& geometry, int stride,
                                        int lat_offset, int lon_offset) {
  geometry.validate();
  if (stride < 1) throw ParameterError("thinning stride must be >= 1");
  if (lat_offset < 0 || lat_offset >= stride || lon_offset < 0 ||
      lon_offset >= stride) {
    throw ParameterError("thinning offsets must lie in [0, stride)");
  }
  if (lat_offset >= geometry.n_lat || lon_offset >= geometry.n_lon) {
    throw ParameterError("thinning offsets leave no observed points");
  }
  ThinningOperator op;
  op.stride = stride;
  op.lat_offset = lat_offset;
  op.lon_offset = lon_offset;
  op.geometry = geometry;
  return op;
}

int ThinningOperator::obs_lat_count() const {
  return (geometry.n_lat - lat_offset + stride - 1) / stride;
}

int ThinningOperator::obs_lon_count() const {
  return (geometry.n_lon - lon_offset + stride - 1) / stride;
}

std::int64_t ThinningOperator::obs_size() const {
  return static_cast<std::int64_t>(geometry.n_features) * obs_lat_count() *
         obs_lon_count();
}

GridGeometry ThinningOperator::observed_geometry() const {
  GridGeometry g;
  g.n_features = geometry.n_features;
  g.n_lat = obs_lat_count();
  g.n_lon = obs_lon_count();
  g.lat_values.resize(g.n_lat);
  for (int i = 0; i < g.n_lat; ++i) {
    g.lat_values[i] = geometry.lat_values[lat_offset + i * stride];
  }
  g.validate();
  return g;
}

std::vector<double> apply_H(const GridState& state, const ThinningOperator& op) {
  if (state.geometry != op.geometry) {
    throw DimensionError("state geometry does not match thinning operator");
  }
  const int nlo = op.obs_lat_count();
  const int nlo2 = op.obs_lon_count();
  std::vector<double> out(static_cast<std::size_t>(op.obs_size()));
  std::size_t idx = 0;
  for (int f = 0; f < op.geometry.n_features; ++f) {
    for (int i = 0; i < nlo; ++i) {
      const int lat = op.lat_offset + i * op.stride;
      for (int j = 0; j < nlo2; ++j) {
        const int lon = op.lon_offset + j * op.stride;
        out[idx++] = state.at(f, lat, lon);
      }
    }
  }
  return out;
}

GridState apply_H_transpose(std::span<const double> obs_values,
                            const ThinningOperator& op, std::int64_t time_index) {
  if (obs_values.size() != static_cast<std::size_t>(op.obs_size())) {
    throw DimensionError("observation vector length does not match operator");
  }
  GridState out = GridState::zeros(op.geometry, time_index);
  const int nlo = op.obs_lat_count();
  const int nlo2 = op.obs_lon_count();
  std::size_t idx = 0;
  for (int f = 0; f < op.geometry.n_features; ++f) {
    for (int i = 0; i < nlo; ++i) {
      const int lat = op.lat_offset + i * op.stride;
      for (int j = 0; j < nlo2; ++j) {
        const int lon = op.lon_offset + j * op.stride;
        out.at(f, lat, lon) = obs_values[idx++];
      }
    }
  }
  return out;
}

ObservationBatch observe(const GridState& state, const ThinningOperator& op,
                         double r, std::uint64_t seed) {
  if (!(r >= 0.0)) throw ParameterError("noise variance must be nonnegative");
  ObservationBatch batch;
  batch.values = apply_H(state, op);
  batch.time_index = state.time_index;
  batch.noise_variance = r;
  if (r > 0.0) {
    RngStream rng(seed);
    const double sd = std::sqrt(r);
    for (double& v : batch.values) v += sd * rng.next_normal();
  }
  return batch;
}

double percent_observed(const ThinningOperator& op) {
  return 100.0 * static_cast<double>(op.obs_size()) /
         static_cast<double>(op.geometry.size());
}

GridState interpolate_baseline(const ObservationBatch& obs,
                               const ThinningOperator& op,
                               const GaussianKernel& kernel, bool allow_mismatch) {
  if (obs.values.size() != static_cast<std::size_t>(op.obs_size())) {
    throw DimensionError("observation vector length does not match operator");
  }
  if (kernel.size != op.stride && !allow_mismatch) {
    throw ParameterError("interpolation kernel side " + std::to_string(kernel.size) +
                         " does not match thinning stride " +
                         std::to_string(op.stride));
  }
  const int nlo = op.obs_lat_count();
  const int nlo2 = op.obs_lon_count();
  // Nearest observed index along one axis; ties round toward the higher index.
  auto nearest = [&](int i, int offset, int count) {
    const double pos = static_cast<double>(i - offset) / op.stride;
    int idx = static_cast<int>(std::floor(pos + 0.5));
    if (idx < 0) idx = 0;
    if (idx >= count) idx = count - 1;
    return idx;
  };

  GridState up = GridState::zeros(op.geometry, obs.time_index);
  for (int f = 0; f < op.geometry.n_features; ++f) {
    const std::size_t base = static_cast<std::size_t>(f) * nlo * nlo2;
    for (int i = 0; i < op.geometry.n_lat; ++i) {
      const int oi = nearest(i, op.lat_offset, nlo);
      for (int j = 0; j < op.geometry.n_lon; ++j) {
        const int oj = nearest(j, op.lon_offset, nlo2);
        up.at(f, i, j) = obs.values[base + static_cast<std::size_t>(oi) * nlo2 + oj];
      }
    }
  }
  return convolve(up, kernel, LonPadding::Replicate);
}

}  // namespace gasm
