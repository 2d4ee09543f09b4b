/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/filter.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "gasm/errors.hpp"

namespace gasm {

FeatureRange FeatureRange::of(const GridState& reference) {
  const auto& g = reference.geometry;
  FeatureRange r;
  r.min.resize(g.n_features);
  r.max.resize(g.n_features);
  for (int f = 0; f < g.n_features; ++f) {
    const auto plane = reference.feature(f);
    double lo = plane[0];
    double hi = plane[0];
    for (double v : plane) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    r.min[f] = lo;
    r.max[f] = hi;
  }
  return r;
}

DivergenceResult divergence_detect(const GridState& state,
                                   std::span<const double> reference_min,
                                   std::span<const double> reference_max) {
  const auto& g = state.geometry;
  if (reference_min.size() != static_cast<std::size_t>(g.n_features) ||
      reference_max.size() != static_cast<std::size_t>(g.n_features)) {
    throw DimensionError("divergence reference does not match feature count");
  }
  DivergenceResult result;
  for (int f = 0; f < g.n_features; ++f) {
    const double lo = reference_min[f] - 0.1 * std::abs(reference_min[f]);
    const double hi = reference_max[f] + 0.1 * std::abs(reference_max[f]);
    for (double v : state.feature(f)) {
      if (v < lo || v > hi || !std::isfinite(v)) {
        result.any = true;
        ++result.flagged;
      }
    }
  }
  return result;
}

std::pair<GridState, GridState> assimilate_step(const Dynamics& dynamics,
                                                const GainApplicator& gain,
                                                const GridState& x_prev,
                                                const ObservationBatch& y) {
  if (y.time_index != x_prev.time_index + 1) {
    throw SequencingError("observation at t=" + std::to_string(y.time_index) +
                          " does not follow state at t=" +
                          std::to_string(x_prev.time_index));
  }
  GridState forecast = dynamics.step(x_prev);
  if (forecast.geometry != gain.op.geometry) {
    throw DimensionError("forecast geometry does not match gain operator");
  }
  std::vector<double> innovation = apply_H(forecast, gain.op);
  if (innovation.size() != y.values.size()) {
    throw DimensionError("observation length does not match gain operator");
  }
  for (std::size_t i = 0; i < innovation.size(); ++i) {
    innovation[i] = y.values[i] - innovation[i];
  }
  const GridState increment = apply_gain(gain, innovation, forecast.time_index);
  GridState analysis = forecast;
  for (std::size_t i = 0; i < analysis.values.size(); ++i) {
    analysis.values[i] += increment.values[i];
  }
  return {std::move(forecast), std::move(analysis)};
}

FilterTrajectory run_filter(const FilterConfig& config,
                            std::span<const ObservationBatch> observations) {
  if (!config.dynamics) throw ParameterError("filter config lacks dynamics");
  const std::int64_t t0 = config.initial_state.time_index;
  std::size_t count = observations.size();
  if (config.horizon > 0) {
    if (static_cast<std::size_t>(config.horizon) > count) {
      throw SequencingError("horizon exceeds available observations");
    }
    count = static_cast<std::size_t>(config.horizon);
  }

  FilterTrajectory trajectory;
  GridState x = config.initial_state;
  for (std::size_t s = 0; s < count; ++s) {
    const ObservationBatch& y = observations[s];
    const std::int64_t t = t0 + static_cast<std::int64_t>(s) + 1;
    if (y.time_index != t) {
      throw SequencingError("observations not consecutive: expected t=" +
                            std::to_string(t) + ", got t=" +
                            std::to_string(y.time_index));
    }
    GridState forecast;
    GridState analysis;
    try {
      auto [fc, an] = assimilate_step(*config.dynamics, config.gain, x, y);
      forecast = std::move(fc);
      analysis = std::move(an);
    } catch (const DivergenceError&) {
      trajectory.diverged_at = t;
      break;
    }
    if (config.divergence_reference) {
      const auto& ref = *config.divergence_reference;
      if (divergence_detect(analysis, ref.min, ref.max).any) {
        trajectory.diverged_at = t;
        break;
      }
    }
    if (config.on_step && !config.on_step(t, forecast, analysis)) {
      trajectory.diverged_at = t;
      break;
    }
    if (config.store_forecasts) trajectory.forecasts.push_back(forecast);
    x = std::move(analysis);
    if (config.store_analyses) trajectory.analyses.push_back(x);
  }
  return trajectory;
}

}  // namespace gasm
