/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/dynamics.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "gasm/conv.hpp"
#include "gasm/errors.hpp"

namespace gasm {

namespace {

void check_finite(const GridState& s, const char* model) {
  if (!all_finite(s)) {
    throw DivergenceError(std::string(model) + " produced non-finite values",
                          s.time_index);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Lorenz-96

Lorenz96::Lorenz96(const Lorenz96Config& config) : config_(config) {
  if (config.n < 4) throw ParameterError("Lorenz-96 needs at least 4 variables");
  if (!(config.dt > 0.0)) throw ParameterError("Lorenz-96 dt must be positive");
  if (config.substeps < 1) throw ParameterError("substeps must be >= 1");
}

GridGeometry Lorenz96::geometry(int n) {
  GridGeometry g;
  g.n_features = 1;
  g.n_lat = 1;
  g.n_lon = n;
  g.lat_values = {0.0};
  g.validate();
  return g;
}

namespace {

void l96_rhs(const std::vector<double>& x, double forcing, std::vector<double>& dx) {
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i) {
    const int ip1 = i + 1 == n ? 0 : i + 1;
    const int im1 = i == 0 ? n - 1 : i - 1;
    const int im2 = i < 2 ? i + n - 2 : i - 2;
    dx[i] = (x[ip1] - x[im2]) * x[im1] - x[i] + forcing;
  }
}

}  // namespace

GridState Lorenz96::step(const GridState& state) const {
  const auto& g = state.geometry;
  if (g.n_features != 1 || g.n_lat != 1 || g.n_lon != config_.n) {
    throw DimensionError("Lorenz-96 expects a 1 x 1 x n grid matching its config");
  }
  const int n = config_.n;
  std::vector<double> x = state.values;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  const double dt = config_.dt;
  for (int s = 0; s < config_.substeps; ++s) {
    l96_rhs(x, config_.forcing, k1);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    l96_rhs(tmp, config_.forcing, k2);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    l96_rhs(tmp, config_.forcing, k3);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    l96_rhs(tmp, config_.forcing, k4);
    for (int i = 0; i < n; ++i) {
      x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
  GridState out;
  out.geometry = g;
  out.values = std::move(x);
  out.time_index = state.time_index + 1;
  check_finite(out, "Lorenz-96");
  return out;
}

std::string Lorenz96::descriptor() const {
  return "lorenz96(n=" + std::to_string(config_.n) +
         ", F=" + std::to_string(config_.forcing) +
         ", dt=" + std::to_string(config_.dt) +
         ", substeps=" + std::to_string(config_.substeps) + ")";
}

// ---------------------------------------------------------------------------
// 2D advection-diffusion toy

Advection2D::Advection2D(const Advection2DConfig& config) : config_(config) {
  if (config.substeps < 1) throw ParameterError("substeps must be >= 1");
  if (!(config.diffusion >= 0.0 && config.diffusion <= 1.0)) {
    throw ParameterError("diffusion coefficient must lie in [0, 1]");
  }
  const double per_sub_u = std::abs(config.u) / config.substeps;
  const double per_sub_v = std::abs(config.v) / config.substeps;
  if (per_sub_u > 1.0 || per_sub_v > 1.0) {
    throw ParameterError("advection velocity exceeds one cell per substep");
  }
}

namespace {

/// Bilinear sample at fractional (lat, lon); latitude replicates, longitude
/// replicates or wraps.
double bilinear(const double* plane, int n_lat, int n_lon, double lat, double lon,
                bool periodic_lon) {
  const double flat = std::floor(lat);
  const double flon = std::floor(lon);
  const double wlat = lat - flat;
  const double wlon = lon - flon;
  int i0 = static_cast<int>(flat);
  int i1 = i0 + 1;
  int j0 = static_cast<int>(flon);
  int j1 = j0 + 1;
  auto clamp = [](int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); };
  auto wrap = [](int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
  };
  i0 = clamp(i0, n_lat);
  i1 = clamp(i1, n_lat);
  if (periodic_lon) {
    j0 = wrap(j0, n_lon);
    j1 = wrap(j1, n_lon);
  } else {
    j0 = clamp(j0, n_lon);
    j1 = clamp(j1, n_lon);
  }
  const double top = (1.0 - wlon) * plane[static_cast<std::size_t>(i0) * n_lon + j0] +
                     wlon * plane[static_cast<std::size_t>(i0) * n_lon + j1];
  const double bot = (1.0 - wlon) * plane[static_cast<std::size_t>(i1) * n_lon + j0] +
                     wlon * plane[static_cast<std::size_t>(i1) * n_lon + j1];
  return (1.0 - wlat) * top + wlat * bot;
}

}  // namespace

GridState Advection2D::step(const GridState& state) const {
  const auto& g = state.geometry;
  static const GaussianKernel kDiffusionKernel = GaussianKernel::gaussian(3, 8.0);
  const double du = config_.u / config_.substeps;
  const double dv = config_.v / config_.substeps;
  const LonPadding pad =
      config_.periodic_lon ? LonPadding::Periodic : LonPadding::Replicate;

  GridState cur = state;
  for (int s = 0; s < config_.substeps; ++s) {
    GridState shifted = GridState::zeros(g, state.time_index);
#pragma omp parallel for collapse(2) schedule(static)
    for (int f = 0; f < g.n_features; ++f) {
      for (int i = 0; i < g.n_lat; ++i) {
        const double* plane = cur.values.data() + f * g.spatial_size();
        double* dst = shifted.values.data() + f * g.spatial_size() +
                      static_cast<std::int64_t>(i) * g.n_lon;
        for (int j = 0; j < g.n_lon; ++j) {
          dst[j] = bilinear(plane, g.n_lat, g.n_lon, i - dv, j - du,
                            config_.periodic_lon);
        }
      }
    }
    if (config_.diffusion > 0.0) {
      cur = state_blend(shifted, convolve(shifted, kDiffusionKernel, pad),
                        config_.diffusion);
    } else {
      cur = std::move(shifted);
    }
  }
  cur.time_index = state.time_index + 1;
  check_finite(cur, "advection2d");
  return cur;
}

std::string Advection2D::descriptor() const {
  return "advection2d(u=" + std::to_string(config_.u) +
         ", v=" + std::to_string(config_.v) +
         ", diffusion=" + std::to_string(config_.diffusion) +
         ", periodic_lon=" + (config_.periodic_lon ? "true" : "false") +
         ", substeps=" + std::to_string(config_.substeps) + ")";
}

// ---------------------------------------------------------------------------
// Diagonal linear model

DiagonalLinear::DiagonalLinear(const DiagonalLinearConfig& config)
    : config_(config) {
  if (config.dim < 1) throw ParameterError("linear model dimension must be >= 1");
}

GridGeometry DiagonalLinear::geometry(int dim) {
  GridGeometry g;
  g.n_features = 1;
  g.n_lat = 1;
  g.n_lon = dim;
  g.lat_values = {0.0};
  g.validate();
  return g;
}

GridState DiagonalLinear::step(const GridState& state) const {
  if (state.geometry.size() != config_.dim) {
    throw DimensionError("linear model dimension mismatch");
  }
  GridState out = state;
  for (double& v : out.values) v *= config_.scale;
  out.time_index = state.time_index + 1;
  check_finite(out, "diagonal linear");
  return out;
}

std::string DiagonalLinear::descriptor() const {
  return "linear(dim=" + std::to_string(config_.dim) +
         ", scale=" + std::to_string(config_.scale) + ")";
}

// ---------------------------------------------------------------------------
// Surrogate wrapper

SurrogateDynamics::SurrogateDynamics(std::shared_ptr<const Dynamics> base,
                                     std::optional<GridState> additive_bias,
                                     bool apply_smoothing, double parameter_bias,
                                     LonPadding smoothing_padding)
    : base_(std::move(base)),
      additive_bias_(std::move(additive_bias)),
      apply_smoothing_(apply_smoothing),
      parameter_bias_(parameter_bias),
      smoothing_padding_(smoothing_padding) {
  if (!base_) throw ParameterError("surrogate needs a base model");
}

GridState SurrogateDynamics::step(const GridState& state) const {
  GridState out = base_->step(state);
  if (additive_bias_) {
    if (additive_bias_->geometry != out.geometry) {
      throw DimensionError("additive bias field geometry mismatch");
    }
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] += additive_bias_->values[i];
    }
  }
  if (apply_smoothing_) {
    const std::int64_t t = out.time_index;
    out = smooth(out, smoothing_padding_);
    out.time_index = t;
  }
  check_finite(out, "surrogate");
  return out;
}

std::string SurrogateDynamics::descriptor() const {
  return "surrogate(base=" + base_->descriptor() +
         ", parameter_bias=" + std::to_string(parameter_bias_) +
         ", additive_bias=" + (additive_bias_ ? "field" : "none") +
         ", smoothing=" + (apply_smoothing_ ? "on" : "off") + ")";
}

}  // namespace gasm
