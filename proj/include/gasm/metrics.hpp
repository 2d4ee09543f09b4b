/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file metrics.hpp
/// Verification metrics: latitude-weighted RMSE, anomaly-free correlation
/// (ACC), and the continuous ranked probability score (CRPS), plus the
/// time-indexed CSV series the commands persist.

#ifndef GASM_METRICS_HPP
#define GASM_METRICS_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gasm/grid.hpp"

namespace gasm {

/// Latitude-weighted RMSE, averaged over features:
///   (1/F) sum_f sqrt( (1/(n_lat n_lon)) sum_{lat,lon} L(lat) diff^2 ).
/// The square root is taken per feature before averaging.
double rmse(const GridState& estimate, const GridState& truth,
            std::span<const double> lat_weights);

/// Correlation between estimate and reference, averaged over features. The
/// default transcribes the operational formula verbatim: only the numerator
/// and the reference-side norm carry the latitude weight,
///   sum L x x' / sqrt( (sum x^2) (sum L x'^2) ),
/// so it is deliberately asymmetric in its arguments. With symmetric = true
/// both norms are weighted. Throws UndefinedMetricError when either norm
/// vanishes.
double acc(const GridState& estimate, const GridState& truth,
           std::span<const double> lat_weights, bool symmetric = false);

/// CRPS of an ensemble sample against a scalar outcome, energy form:
///   (1/M) sum_i |x_i - y| - (1/(2 M^2)) sum_{i,j} |x_i - x_j|.
double crps(std::span<const double> ensemble, double outcome);

/// A 2D track position per lead time for each ensemble member.
struct TrackPoint {
  int lat = 0;
  int lon = 0;
};

/// Mean of the per-coordinate CRPS (latitude index and longitude index
/// averaged) per lead time, against a reference track.
std::vector<double> trajectory_crps(
    const std::vector<std::vector<TrackPoint>>& member_tracks,
    std::span<const TrackPoint> reference_track);

struct MetricRow {
  std::int64_t time_index = 0;
  std::string metric_name;
  double value = 0.0;
};

/// Accumulates rows and serializes them sorted by (time_index, metric_name)
/// with a fixed shortest-round-trip float format, so identical runs produce
/// byte-identical files.
class MetricSeries {
 public:
  void add(std::int64_t time_index, std::string metric_name, double value);
  const std::vector<MetricRow>& rows() const { return rows_; }
  /// Drops every row with time_index >= cutoff.
  void truncate_from(std::int64_t cutoff);
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;
  static MetricSeries from_csv_file(const std::filesystem::path& path);

 private:
  std::vector<MetricRow> rows_;
};

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace gasm

#endif  // GASM_METRICS_HPP
