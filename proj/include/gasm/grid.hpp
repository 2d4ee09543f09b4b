/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file grid.hpp
/// Gridded multi-feature state: geometry, storage layout, standardization,
/// latitude weighting, and small pointwise utilities. The value layout is
/// feature-major row-major: index(f, lat, lon) = (f * n_lat + lat) * n_lon + lon,
/// with latitudes ordered north to south.

#ifndef GASM_GRID_HPP
#define GASM_GRID_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace gasm {

struct GridGeometry {
  int n_features = 1;
  int n_lat = 1;
  int n_lon = 1;
  /// Latitudes in degrees, strictly decreasing (north to south), size n_lat.
  std::vector<double> lat_values;

  /// Validates counts and latitude ordering; throws DimensionError / ParameterError.
  void validate() const;

  std::int64_t size() const {
    return static_cast<std::int64_t>(n_features) * n_lat * n_lon;
  }
  std::int64_t spatial_size() const {
    return static_cast<std::int64_t>(n_lat) * n_lon;
  }
  std::int64_t flat(int f, int lat, int lon) const {
    return (static_cast<std::int64_t>(f) * n_lat + lat) * n_lon + lon;
  }

  bool operator==(const GridGeometry&) const = default;

  /// Equator-symmetric cell-center latitudes: lat_j = 90 - (j + 1/2) * 180 / n_lat.
  static GridGeometry regular(int n_features, int n_lat, int n_lon);
  /// Inclusive linspace from lat_north down to lat_south.
  static GridGeometry spanned(int n_features, int n_lat, int n_lon,
                              double lat_north, double lat_south);
};

struct GridState {
  GridGeometry geometry;
  std::vector<double> values;  ///< size geometry.size(), feature-major row-major
  std::int64_t time_index = 0;

  double& at(int f, int lat, int lon) { return values[geometry.flat(f, lat, lon)]; }
  double at(int f, int lat, int lon) const { return values[geometry.flat(f, lat, lon)]; }

  std::span<double> feature(int f) {
    return std::span<double>(values).subspan(geometry.flat(f, 0, 0),
                                             geometry.spatial_size());
  }
  std::span<const double> feature(int f) const {
    return std::span<const double>(values).subspan(geometry.flat(f, 0, 0),
                                                   geometry.spatial_size());
  }

  static GridState zeros(const GridGeometry& g, std::int64_t time_index = 0);
};

/// Per-feature first and second moments used for (de)standardization.
struct FeatureStats {
  std::vector<double> means;
  std::vector<double> stds;  ///< all entries must be positive
};

/// (x - mean_f) / std_f per feature. Throws ParameterError on nonpositive std,
/// DimensionError on feature-count mismatch.
GridState standardize(const GridState& state, const FeatureStats& stats);

/// Inverse of standardize; destandardize(standardize(x)) == x up to rounding.
GridState destandardize(const GridState& state, const FeatureStats& stats);

/// Area weights L(j) = cos(lat_j) / mean_j cos(lat_j), one per latitude row.
/// Latitudes with |lat| = 90 get weight zero before normalization; the mean of
/// the returned weights is exactly one up to rounding.
std::vector<double> latitude_weights(const GridGeometry& g);

/// sqrt(u^2 + v^2) from two feature planes; result is a single-feature state.
GridState derived_wind_speed(const GridState& state, int u_feature, int v_feature);

/// a + alpha * (b - a), elementwise; geometries must match.
GridState state_blend(const GridState& a, const GridState& b, double alpha);

/// Copies one feature plane into a standalone single-feature state.
GridState extract_feature(const GridState& state, int f);

bool all_finite(const GridState& state);

}  // namespace gasm

#endif  // GASM_GRID_HPP
