/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file forecast.hpp
/// Ensemble forecasting from assimilated states: perturbed-member rollouts,
/// minimum tracking, and the initialization comparison that scores forecasts
/// launched from analyses against observation-only and reference baselines.

#ifndef GASM_FORECAST_HPP
#define GASM_FORECAST_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gasm/dynamics.hpp"
#include "gasm/grid.hpp"
#include "gasm/metrics.hpp"
#include "gasm/obs.hpp"

namespace gasm {

struct EnsembleConfig {
  int size = 50;
  double perturbation_std = 0.3;
  std::uint64_t seed = 0;
  /// Keep member 0 unperturbed as a control member.
  bool control_member = false;
};

/// size copies of init with iid N(0, std^2) perturbations per value. Member m
/// draws from the stream (seed, EnsemblePerturb, init.time_index, m), so
/// enlarging the ensemble never changes existing members.
std::vector<GridState> make_ensemble(const GridState& init,
                                     const EnsembleConfig& config);

/// h successive steps; element l holds the state at lead l + 1.
std::vector<GridState> rollout(const GridState& init, const Dynamics& dynamics,
                               int horizon);

struct GridPoint {
  int lat = 0;
  int lon = 0;
  double value = 0.0;
};

struct Region {
  int lat_lo = 0, lat_hi = 0;  ///< inclusive bounds
  int lon_lo = 0, lon_hi = 0;
};

/// Position and value of the minimum of a single-feature field, optionally
/// restricted to a region. Ties break lexicographically on (lat, lon).
GridPoint track_minimum(const GridState& field,
                        const std::optional<Region>& region = std::nullopt);

enum class InitializationKind {
  InterpolatedObservations,
  Truth,
  Analysis,
  Climatology,
};

std::string to_string(InitializationKind kind);

/// Random access into a persisted or in-memory state sequence.
struct SequenceView {
  std::function<GridState(std::int64_t)> at;
  std::int64_t first = 0;
  std::int64_t last = 0;  ///< inclusive
};

struct LeadRow {
  InitializationKind kind;
  std::string metric;  ///< "rmse" or "acc"
  int lead = 0;
  double mean = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
};

struct InitializationComparison {
  std::vector<LeadRow> rows;  ///< ordered by (kind, metric, lead)
  std::string to_csv() const;
};

/// For each start time (first, first + stride, ... while start + horizon <=
/// truth.last) and each initialization kind, rolls the forecast model out to
/// `horizon` and scores every lead (0 .. horizon) against the truth. Rows
/// aggregate over start times with mean and 5 / 95 percent quantiles (linear
/// interpolation between order statistics). Lead 0 scores the initialization
/// itself.
InitializationComparison compare_initializations(
    const SequenceView& truth, const SequenceView& analyses,
    const std::function<ObservationBatch(std::int64_t)>& observations,
    const GridState& climatology, const Dynamics& forecast_model,
    const ThinningOperator& op, const GaussianKernel& interp_kernel, int horizon,
    int start_stride);

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> sample, double q);

}  // namespace gasm

#endif  // GASM_FORECAST_HPP
