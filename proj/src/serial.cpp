/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/serial.hpp"

#include <cmath>

#include "gasm/errors.hpp"

namespace gasm::serial {

namespace {

int pad_index(int i, int n, bool periodic) {
  if (periodic) {
    int r = i % n;
    return r < 0 ? r + n : r;
  }
  return i < 0 ? 0 : (i >= n ? n - 1 : i);
}

}  // namespace

GridState convolve(const GridState& state, const GaussianKernel& kernel,
                   LonPadding lon_padding) {
  const auto& g = state.geometry;
  const int k = kernel.size;
  const int m = k / 2;
  const bool periodic = lon_padding == LonPadding::Periodic;
  GridState out = GridState::zeros(g, state.time_index);
  for (int f = 0; f < g.n_features; ++f) {
    for (int i = 0; i < g.n_lat; ++i) {
      for (int j = 0; j < g.n_lon; ++j) {
        double acc = 0.0;
        for (int a = 0; a < k; ++a) {
          const int src_i = pad_index(i - m + a, g.n_lat, false);
          for (int b = 0; b < k; ++b) {
            const int src_j = pad_index(j - m + b, g.n_lon, periodic);
            acc += kernel.at(a, b) * state.at(f, src_i, src_j);
          }
        }
        out.at(f, i, j) = acc;
      }
    }
  }
  return out;
}

GridState convolve_adjoint(const GridState& state, const GaussianKernel& kernel,
                           LonPadding lon_padding) {
  const auto& g = state.geometry;
  const int k = kernel.size;
  const int m = k / 2;
  const bool periodic = lon_padding == LonPadding::Periodic;
  GridState out = GridState::zeros(g, state.time_index);
  for (int f = 0; f < g.n_features; ++f) {
    for (int i = 0; i < g.n_lat; ++i) {
      for (int j = 0; j < g.n_lon; ++j) {
        const double v = state.at(f, i, j);
        for (int a = 0; a < k; ++a) {
          const int dst_i = pad_index(i - m + a, g.n_lat, false);
          for (int b = 0; b < k; ++b) {
            const int dst_j = pad_index(j - m + b, g.n_lon, periodic);
            out.at(f, dst_i, dst_j) += kernel.at(a, b) * v;
          }
        }
      }
    }
  }
  return out;
}

double rmse(const GridState& estimate, const GridState& truth,
            std::span<const double> lat_weights) {
  const auto& g = estimate.geometry;
  if (g != truth.geometry) throw DimensionError("metric geometry mismatch");
  double feature_sum = 0.0;
  for (int f = 0; f < g.n_features; ++f) {
    double acc = 0.0;
    for (int i = 0; i < g.n_lat; ++i) {
      for (int j = 0; j < g.n_lon; ++j) {
        const double d = estimate.at(f, i, j) - truth.at(f, i, j);
        acc += lat_weights[i] * d * d;
      }
    }
    feature_sum += std::sqrt(acc / static_cast<double>(g.spatial_size()));
  }
  return feature_sum / g.n_features;
}

}  // namespace gasm::serial
