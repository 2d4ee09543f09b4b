/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file obs.hpp
/// Grid-thinning observation operator H: every feature is observed at every
/// stride-th latitude and longitude starting from the configured offsets.
/// Observation vectors are ordered feature-major row-major over the thinned
/// grid, matching the state layout.

#ifndef GASM_OBS_HPP
#define GASM_OBS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "gasm/conv.hpp"
#include "gasm/grid.hpp"

namespace gasm {

struct ThinningOperator {
  int stride = 1;
  int lat_offset = 0;
  int lon_offset = 0;
  GridGeometry geometry;  ///< geometry of the full (unthinned) state

  /// Validates stride >= 1 and 0 <= offsets < stride; throws ParameterError.
  static ThinningOperator make(const GridGeometry& geometry, int stride,
                               int lat_offset = 0, int lon_offset = 0);

  int obs_lat_count() const;
  int obs_lon_count() const;
  /// Observed dimension d_y = n_features * obs_lat_count * obs_lon_count.
  std::int64_t obs_size() const;

  /// Thinned geometry (subsampled latitudes), used to persist observations
  /// through the snapshot format.
  GridGeometry observed_geometry() const;
};

struct ObservationBatch {
  std::vector<double> values;  ///< length op.obs_size()
  std::int64_t time_index = 0;
  double noise_variance = 0.0;
};

/// y = H x + noise with noise ~ N(0, r I), drawn from the stream seeded by
/// `seed`. Identical (state, op, r, seed) give bit-identical output.
ObservationBatch observe(const GridState& state, const ThinningOperator& op,
                         double r, std::uint64_t seed);

/// H x without noise.
std::vector<double> apply_H(const GridState& state, const ThinningOperator& op);

/// H^T y: scatter observed values onto the full grid, zeros elsewhere.
GridState apply_H_transpose(std::span<const double> obs_values,
                            const ThinningOperator& op,
                            std::int64_t time_index = 0);

/// 100 * d_y / d_x.
double percent_observed(const ThinningOperator& op);

/// Gridded baseline from observations alone: nearest-neighbor upsample to the
/// full grid followed by one forward convolve pass. The kernel side must equal
/// op.stride unless allow_mismatch is set.
GridState interpolate_baseline(const ObservationBatch& obs,
                               const ThinningOperator& op,
                               const GaussianKernel& kernel,
                               bool allow_mismatch = false);

}  // namespace gasm

#endif  // GASM_OBS_HPP
