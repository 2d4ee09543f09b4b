/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/grid.hpp"

#include <cmath>
#include <string>

#include "gasm/errors.hpp"

namespace gasm {

void GridGeometry::validate() const {
  if (n_features < 1 || n_lat < 1 || n_lon < 1) {
    throw ParameterError("grid counts must be positive");
  }
  if (static_cast<int>(lat_values.size()) != n_lat) {
    throw DimensionError("lat_values size " + std::to_string(lat_values.size()) +
                         " does not match n_lat " + std::to_string(n_lat));
  }
  for (int j = 0; j + 1 < n_lat; ++j) {
    if (!(lat_values[j] > lat_values[j + 1])) {
      throw ParameterError("latitudes must be strictly decreasing north to south");
    }
  }
  for (double lat : lat_values) {
    if (!(lat >= -90.0 && lat <= 90.0)) {
      throw ParameterError("latitude out of [-90, 90]");
    }
  }
}

GridGeometry GridGeometry::regular(int n_features, int n_lat, int n_lon) {
  GridGeometry g;
  g.n_features = n_features;
  g.n_lat = n_lat;
  g.n_lon = n_lon;
  g.lat_values.resize(n_lat);
  for (int j = 0; j < n_lat; ++j) {
    g.lat_values[j] = 90.0 - (j + 0.5) * 180.0 / n_lat;
  }
  g.validate();
  return g;
}

GridGeometry GridGeometry::spanned(int n_features, int n_lat, int n_lon,
                                   double lat_north, double lat_south) {
  GridGeometry g;
  g.n_features = n_features;
  g.n_lat = n_lat;
  g.n_lon = n_lon;
  g.lat_values.resize(n_lat);
  if (n_lat == 1) {
    g.lat_values[0] = lat_north;
  } else {
    for (int j = 0; j < n_lat; ++j) {
      g.lat_values[j] = lat_north + (lat_south - lat_north) * j / (n_lat - 1);
    }
  }
  g.validate();
  return g;
}

GridState GridState::zeros(const GridGeometry& g, std::int64_t time_index) {
  g.validate();
  GridState s;
  s.geometry = g;
  s.values.assign(static_cast<std::size_t>(g.size()), 0.0);
  s.time_index = time_index;
  return s;
}

GridState standardize(const GridState& state, const FeatureStats& stats) {
  const auto& g = state.geometry;
  if (static_cast<int>(stats.means.size()) != g.n_features ||
      static_cast<int>(stats.stds.size()) != g.n_features) {
    throw DimensionError("feature stats do not match feature count");
  }
  for (double s : stats.stds) {
    if (!(s > 0.0)) throw ParameterError("feature std must be positive");
  }
  GridState out = state;
  const std::int64_t plane = g.spatial_size();
  for (int f = 0; f < g.n_features; ++f) {
    const double m = stats.means[f];
    const double inv = 1.0 / stats.stds[f];
    double* p = out.values.data() + f * plane;
    for (std::int64_t i = 0; i < plane; ++i) p[i] = (p[i] - m) * inv;
  }
  return out;
}

GridState destandardize(const GridState& state, const FeatureStats& stats) {
  const auto& g = state.geometry;
  if (static_cast<int>(stats.means.size()) != g.n_features ||
      static_cast<int>(stats.stds.size()) != g.n_features) {
    throw DimensionError("feature stats do not match feature count");
  }
  for (double s : stats.stds) {
    if (!(s > 0.0)) throw ParameterError("feature std must be positive");
  }
  GridState out = state;
  const std::int64_t plane = g.spatial_size();
  for (int f = 0; f < g.n_features; ++f) {
    const double m = stats.means[f];
    const double s = stats.stds[f];
    double* p = out.values.data() + f * plane;
    for (std::int64_t i = 0; i < plane; ++i) p[i] = p[i] * s + m;
  }
  return out;
}

std::vector<double> latitude_weights(const GridGeometry& g) {
  g.validate();
  constexpr double kPi = 3.141592653589793238462643383279502884;
  std::vector<double> w(g.n_lat);
  double sum = 0.0;
  for (int j = 0; j < g.n_lat; ++j) {
    const double lat = g.lat_values[j];
    w[j] = (lat == 90.0 || lat == -90.0) ? 0.0 : std::cos(lat * kPi / 180.0);
    sum += w[j];
  }
  if (!(sum > 0.0)) throw ParameterError("all latitude weights vanish");
  const double scale = g.n_lat / sum;
  for (double& x : w) x *= scale;
  return w;
}

GridState derived_wind_speed(const GridState& state, int u_feature, int v_feature) {
  const auto& g = state.geometry;
  if (u_feature < 0 || u_feature >= g.n_features || v_feature < 0 ||
      v_feature >= g.n_features) {
    throw DimensionError("wind component feature index out of range");
  }
  GridGeometry out_g = g;
  out_g.n_features = 1;
  GridState out = GridState::zeros(out_g, state.time_index);
  const auto u = state.feature(u_feature);
  const auto v = state.feature(v_feature);
  for (std::int64_t i = 0; i < g.spatial_size(); ++i) {
    out.values[i] = std::hypot(u[i], v[i]);
  }
  return out;
}

GridState state_blend(const GridState& a, const GridState& b, double alpha) {
  if (a.geometry != b.geometry) throw DimensionError("state_blend geometry mismatch");
  GridState out = a;
  // (1 - alpha) a + alpha b so that alpha = 0 / 1 reproduce the inputs exactly.
  const double w = 1.0 - alpha;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = w * a.values[i] + alpha * b.values[i];
  }
  return out;
}

GridState extract_feature(const GridState& state, int f) {
  if (f < 0 || f >= state.geometry.n_features) {
    throw DimensionError("feature index out of range");
  }
  GridGeometry g = state.geometry;
  g.n_features = 1;
  GridState out = GridState::zeros(g, state.time_index);
  const auto plane = state.feature(f);
  std::copy(plane.begin(), plane.end(), out.values.begin());
  return out;
}

bool all_finite(const GridState& state) {
  for (double v : state.values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace gasm
