/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/conv.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "gasm/errors.hpp"

namespace gasm {

namespace {

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

int wrap_index(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

/// Tap-to-input index table for one axis: idx[i * k + a] is the padded input
/// index read by tap a of output index i.
std::vector<int> axis_table(int n, int k, bool periodic) {
  const int m = k / 2;
  std::vector<int> idx(static_cast<std::size_t>(n) * k);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < k; ++a) {
      const int raw = i - m + a;
      idx[static_cast<std::size_t>(i) * k + a] =
          periodic ? wrap_index(raw, n) : clamp_index(raw, n);
    }
  }
  return idx;
}

/// Transposed table for one axis: for each input index p, the list of
/// (output index, tap) pairs that read p. The per-axis lists factor the 2D
/// adjoint into a Cartesian product, which keeps it an exact transpose and a
/// pure gather (deterministic under threading).
std::vector<std::vector<std::pair<int, int>>> axis_adjoint_table(int n, int k,
                                                                 bool periodic) {
  std::vector<std::vector<std::pair<int, int>>> lists(n);
  const int m = k / 2;
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < k; ++a) {
      const int raw = i - m + a;
      const int p = periodic ? wrap_index(raw, n) : clamp_index(raw, n);
      lists[p].emplace_back(i, a);
    }
  }
  return lists;
}

void check_kernel(const GaussianKernel& kernel) {
  if (kernel.size < 1) throw ParameterError("kernel side must be positive");
  if (kernel.weights.size() !=
      static_cast<std::size_t>(kernel.size) * kernel.size) {
    throw DimensionError("kernel weight count does not match side length");
  }
}

}  // namespace

GaussianKernel GaussianKernel::gaussian(int k, double sigma2) {
  if (k < 1) throw ParameterError("kernel side must be positive");
  if (!(sigma2 > 0.0)) throw ParameterError("kernel sigma2 must be positive");
  GaussianKernel kernel;
  kernel.size = k;
  kernel.sigma2 = sigma2;
  kernel.weights.resize(static_cast<std::size_t>(k) * k);
  const int m = k / 2;
  double sum = 0.0;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const double d2 = static_cast<double>((a - m) * (a - m) + (b - m) * (b - m));
      const double w = std::exp(-d2 / (2.0 * sigma2));
      kernel.weights[a * k + b] = w;
      sum += w;
    }
  }
  for (double& w : kernel.weights) w /= sum;
  return kernel;
}

GaussianKernel GaussianKernel::from_weights(int k, std::vector<double> weights) {
  if (k < 1) throw ParameterError("kernel side must be positive");
  if (weights.size() != static_cast<std::size_t>(k) * k) {
    throw DimensionError("kernel weight count does not match side length");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ParameterError("kernel weights must be nonnegative");
    sum += w;
  }
  if (!(sum > 0.0)) throw ParameterError("kernel weights must not all vanish");
  for (double& w : weights) w /= sum;
  GaussianKernel kernel;
  kernel.size = k;
  kernel.sigma2 = 0.0;
  kernel.weights = std::move(weights);
  return kernel;
}

GridState convolve(const GridState& state, const GaussianKernel& kernel,
                   LonPadding lon_padding) {
  check_kernel(kernel);
  const auto& g = state.geometry;
  const int k = kernel.size;
  const auto lat_idx = axis_table(g.n_lat, k, false);
  const auto lon_idx = axis_table(g.n_lon, k, lon_padding == LonPadding::Periodic);

  GridState out = GridState::zeros(g, state.time_index);
  const std::int64_t plane = g.spatial_size();
#pragma omp parallel for collapse(2) schedule(static)
  for (int f = 0; f < g.n_features; ++f) {
    for (int i = 0; i < g.n_lat; ++i) {
      const double* in = state.values.data() + f * plane;
      double* dst = out.values.data() + f * plane + static_cast<std::int64_t>(i) * g.n_lon;
      const int* li = lat_idx.data() + static_cast<std::size_t>(i) * k;
      for (int j = 0; j < g.n_lon; ++j) {
        const int* lj = lon_idx.data() + static_cast<std::size_t>(j) * k;
        double acc = 0.0;
        for (int a = 0; a < k; ++a) {
          const double* row = in + static_cast<std::int64_t>(li[a]) * g.n_lon;
          const double* w = kernel.weights.data() + a * k;
          for (int b = 0; b < k; ++b) acc += w[b] * row[lj[b]];
        }
        dst[j] = acc;
      }
    }
  }
  return out;
}

GridState convolve_adjoint(const GridState& state, const GaussianKernel& kernel,
                           LonPadding lon_padding) {
  check_kernel(kernel);
  const auto& g = state.geometry;
  const int k = kernel.size;
  const auto lat_lists = axis_adjoint_table(g.n_lat, k, false);
  const auto lon_lists =
      axis_adjoint_table(g.n_lon, k, lon_padding == LonPadding::Periodic);

  GridState out = GridState::zeros(g, state.time_index);
  const std::int64_t plane = g.spatial_size();
#pragma omp parallel for collapse(2) schedule(static)
  for (int f = 0; f < g.n_features; ++f) {
    for (int p = 0; p < g.n_lat; ++p) {
      const double* in = state.values.data() + f * plane;
      double* dst = out.values.data() + f * plane + static_cast<std::int64_t>(p) * g.n_lon;
      for (int q = 0; q < g.n_lon; ++q) {
        double acc = 0.0;
        for (const auto& [i, a] : lat_lists[p]) {
          const double* row = in + static_cast<std::int64_t>(i) * g.n_lon;
          const double* w = kernel.weights.data() + a * k;
          for (const auto& [j, b] : lon_lists[q]) acc += w[b] * row[j];
        }
        dst[q] = acc;
      }
    }
  }
  return out;
}

GridState smooth(const GridState& state, LonPadding lon_padding) {
  static const GaussianKernel kSmoother = GaussianKernel::gaussian(4, 8.0);
  return convolve(state, kSmoother, lon_padding);
}

}  // namespace gasm
