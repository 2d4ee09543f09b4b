/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "gasm/errors.hpp"

namespace gasm {

namespace {

void check_pair(const GridState& a, const GridState& b,
                std::span<const double> lat_weights) {
  if (a.geometry != b.geometry) throw DimensionError("metric geometry mismatch");
  if (lat_weights.size() != static_cast<std::size_t>(a.geometry.n_lat)) {
    throw DimensionError("latitude weight count does not match grid");
  }
}

}  // namespace

double rmse(const GridState& estimate, const GridState& truth,
            std::span<const double> lat_weights) {
  check_pair(estimate, truth, lat_weights);
  const auto& g = estimate.geometry;
  const std::int64_t plane = g.spatial_size();
  double feature_sum = 0.0;
  // Row partials accumulated in fixed order keep the reduction deterministic
  // across thread counts.
  std::vector<double> row_sum(static_cast<std::size_t>(g.n_features) * g.n_lat, 0.0);
#pragma omp parallel for collapse(2) schedule(static)
  for (int f = 0; f < g.n_features; ++f) {
    for (int i = 0; i < g.n_lat; ++i) {
      const double* e = estimate.values.data() + f * plane +
                        static_cast<std::int64_t>(i) * g.n_lon;
      const double* t = truth.values.data() + f * plane +
                        static_cast<std::int64_t>(i) * g.n_lon;
      double acc = 0.0;
      for (int j = 0; j < g.n_lon; ++j) {
        const double d = e[j] - t[j];
        acc += d * d;
      }
      row_sum[static_cast<std::size_t>(f) * g.n_lat + i] = lat_weights[i] * acc;
    }
  }
  for (int f = 0; f < g.n_features; ++f) {
    double acc = 0.0;
    for (int i = 0; i < g.n_lat; ++i) {
      acc += row_sum[static_cast<std::size_t>(f) * g.n_lat + i];
    }
    feature_sum += std::sqrt(acc / static_cast<double>(plane));
  }
  return feature_sum / g.n_features;
}

double acc(const GridState& estimate, const GridState& truth,
           std::span<const double> lat_weights, bool symmetric) {
  check_pair(estimate, truth, lat_weights);
  const auto& g = estimate.geometry;
  const std::int64_t plane = g.spatial_size();
  double feature_sum = 0.0;
  for (int f = 0; f < g.n_features; ++f) {
    const double* e = estimate.values.data() + f * plane;
    const double* t = truth.values.data() + f * plane;
    double num = 0.0, est_norm = 0.0, ref_norm = 0.0;
    for (int i = 0; i < g.n_lat; ++i) {
      const double w = lat_weights[i];
      const double* er = e + static_cast<std::int64_t>(i) * g.n_lon;
      const double* tr = t + static_cast<std::int64_t>(i) * g.n_lon;
      for (int j = 0; j < g.n_lon; ++j) {
        num += w * er[j] * tr[j];
        est_norm += symmetric ? w * er[j] * er[j] : er[j] * er[j];
        ref_norm += w * tr[j] * tr[j];
      }
    }
    if (!(est_norm > 0.0) || !(ref_norm > 0.0)) {
      throw UndefinedMetricError("correlation undefined for zero-norm field");
    }
    feature_sum += num / std::sqrt(est_norm * ref_norm);
  }
  return feature_sum / g.n_features;
}

double crps(std::span<const double> ensemble, double outcome) {
  if (ensemble.empty()) throw ParameterError("CRPS needs a nonempty ensemble");
  const std::size_t m = ensemble.size();
  double dist = 0.0;
  for (double x : ensemble) dist += std::abs(x - outcome);
  double spread = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      spread += std::abs(ensemble[i] - ensemble[j]);
    }
  }
  const double md = static_cast<double>(m);
  return dist / md - spread / (2.0 * md * md);
}

std::vector<double> trajectory_crps(
    const std::vector<std::vector<TrackPoint>>& member_tracks,
    std::span<const TrackPoint> reference_track) {
  if (member_tracks.empty()) throw ParameterError("no ensemble tracks");
  const std::size_t leads = reference_track.size();
  for (const auto& track : member_tracks) {
    if (track.size() != leads) {
      throw DimensionError("track length does not match reference");
    }
  }
  std::vector<double> out(leads);
  std::vector<double> lat_sample(member_tracks.size());
  std::vector<double> lon_sample(member_tracks.size());
  for (std::size_t l = 0; l < leads; ++l) {
    for (std::size_t k = 0; k < member_tracks.size(); ++k) {
      lat_sample[k] = member_tracks[k][l].lat;
      lon_sample[k] = member_tracks[k][l].lon;
    }
    out[l] = 0.5 * (crps(lat_sample, reference_track[l].lat) +
                    crps(lon_sample, reference_track[l].lon));
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void MetricSeries::add(std::int64_t time_index, std::string metric_name,
                       double value) {
  rows_.push_back(MetricRow{time_index, std::move(metric_name), value});
}

void MetricSeries::truncate_from(std::int64_t cutoff) {
  std::erase_if(rows_, [cutoff](const MetricRow& r) { return r.time_index >= cutoff; });
}

std::string MetricSeries::to_csv() const {
  std::vector<MetricRow> sorted = rows_;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MetricRow& a, const MetricRow& b) {
                     if (a.time_index != b.time_index) {
                       return a.time_index < b.time_index;
                     }
                     return a.metric_name < b.metric_name;
                   });
  std::string out = "time_index,metric_name,value\n";
  for (const auto& row : sorted) {
    out += std::to_string(row.time_index);
    out += ',';
    out += row.metric_name;
    out += ',';
    out += format_double(row.value);
    out += '\n';
  }
  return out;
}

void MetricSeries::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  const std::string text = to_csv();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("short write: " + path.string());
}

MetricSeries MetricSeries::from_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metrics csv: " + path.string());
  MetricSeries series;
  std::string line;
  if (!std::getline(in, line) || line != "time_index,metric_name,value") {
    throw IoError("bad metrics csv header in " + path.string());
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string t, name, value;
    if (!std::getline(ls, t, ',') || !std::getline(ls, name, ',') ||
        !std::getline(ls, value)) {
      throw IoError("malformed metrics row: " + line);
    }
    series.add(std::stoll(t), name, std::stod(value));
  }
  return series;
}

}  // namespace gasm
