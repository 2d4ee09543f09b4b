/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file filter.hpp
/// Sequential analysis recursion
///   x_t = (I - K H) F(x_{t-1}) + K y_t
/// realized as forecast, innovation, gridded gain increment. One run_filter
/// call covers both the surrogate filter (imperfect forecast model) and the
/// reference recursion with the true model; they differ only in the dynamics
/// placed in the config.

#ifndef GASM_FILTER_HPP
#define GASM_FILTER_HPP

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gasm/covariance.hpp"
#include "gasm/dynamics.hpp"
#include "gasm/grid.hpp"
#include "gasm/obs.hpp"

namespace gasm {

/// Per-feature admissible ranges for divergence detection.
struct FeatureRange {
  std::vector<double> min;
  std::vector<double> max;

  static FeatureRange of(const GridState& reference);
};

struct DivergenceResult {
  bool any = false;
  std::int64_t flagged = 0;  ///< number of out-of-range values
};

/// Flags values outside the reference range widened by ten percent: value v of
/// feature f is out of range when v < min_f - 0.1 |min_f| or
/// v > max_f + 0.1 |max_f| (strict inequalities).
DivergenceResult divergence_detect(const GridState& state,
                                   std::span<const double> reference_min,
                                   std::span<const double> reference_max);

struct FilterConfig {
  std::shared_ptr<const Dynamics> dynamics;
  GainApplicator gain;  ///< carries the thinning operator and noise variance
  GridState initial_state;
  int horizon = 0;  ///< 0 means run through all supplied observations

  /// Static divergence reference; empty disables the built-in check.
  std::optional<FeatureRange> divergence_reference;

  /// Called after each cycle with (t, forecast, analysis). Returning false
  /// halts the run and records diverged_at = t; per-time divergence rules
  /// (references that change every cycle) plug in here.
  std::function<bool(std::int64_t, const GridState&, const GridState&)> on_step;

  bool store_analyses = true;
  bool store_forecasts = false;
};

struct FilterTrajectory {
  std::vector<GridState> analyses;   ///< analyses before the halt, if storing
  std::vector<GridState> forecasts;  ///< matching forecasts, if storing
  std::optional<std::int64_t> diverged_at;
};

/// One cycle: forecast = dynamics(x_prev), then the gain update against y.
/// Requires y.time_index == x_prev.time_index + 1 (SequencingError otherwise).
/// Returns (forecast, analysis).
std::pair<GridState, GridState> assimilate_step(const Dynamics& dynamics,
                                                const GainApplicator& gain,
                                                const GridState& x_prev,
                                                const ObservationBatch& y);

/// Runs the recursion over consecutively indexed observations starting at
/// initial_state.time_index + 1. On a divergence flag (built-in range check,
/// sink veto, or a DivergenceError from the dynamics) the run halts, the
/// flagged cycle is excluded from the stored analyses, and diverged_at records
/// the first bad cycle.
FilterTrajectory run_filter(const FilterConfig& config,
                            std::span<const ObservationBatch> observations);

}  // namespace gasm

#endif  // GASM_FILTER_HPP
