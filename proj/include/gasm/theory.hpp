/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file theory.hpp
/// Numerical verification of the long-time accuracy bound: with
///   lambda = sup ||(I - K H) DF(x)||_2   (filter contraction factor),
///   epsilon = sup ||(I - K H)(F_s(x) - F(x))||_2   (projected model defect),
///   gamma ~ the observation noise scale,
/// a contractive filter (lambda < 1) keeps the long-run analysis error below
/// c (gamma + epsilon) / (1 - lambda). This module estimates the three
/// quantities from sampled states and compares the bound against the measured
/// tail error of a run.

#ifndef GASM_THEORY_HPP
#define GASM_THEORY_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "gasm/covariance.hpp"
#include "gasm/dynamics.hpp"
#include "gasm/grid.hpp"

namespace gasm {

/// Central-difference directional derivative (F(x + h v) - F(x - h v)) / (2 h).
/// The returned state keeps x's time_index.
GridState jvp(const Dynamics& dynamics, const GridState& x, const GridState& v,
              double h);

/// Default finite-difference step 1e-5 * (1 + ||x||_inf).
double default_fd_step(const GridState& x);

/// A linear map on states, e.g. w -> (I - K H) w.
using StateMap = std::function<GridState(const GridState&)>;

/// The residual projector w - K H w for a structured gain.
StateMap make_residual_projector(const GainApplicator& gain);

struct SpectralOptions {
  int max_iterations = 200;
  double rel_tolerance = 1e-6;
  /// Dense-tangent capacity guard: states bigger than this are rejected.
  std::int64_t max_dimension = 2048;
};

struct ContractionEstimate {
  double lambda_hat = 0.0;
  bool converged = true;  ///< false if any per-sample iteration hit the cap
};

/// sup over samples of ||P DF(x)||_2 where P is the projector. The tangent
/// DF(x) is materialized column-by-column from central-difference jvps (which
/// also provides its transpose), then the norm comes from power iteration on
/// the Gram operator, retaining the best Rayleigh quotient seen.
ContractionEstimate contraction_estimate(const Dynamics& dynamics,
                                         const StateMap& projector,
                                         std::span<const GridState> samples,
                                         const SpectralOptions& options = {});

/// sup over samples of ||P (F_s(x) - F(x))||_2.
double defect_estimate(const Dynamics& truth_model, const Dynamics& surrogate,
                       const StateMap& projector,
                       std::span<const GridState> samples);

/// Mean of ||K(sqrt(r) eta)||_2 over standard normal draws eta: the per-cycle
/// scale at which observation noise enters the analysis.
double gamma_estimate(const GainApplicator& gain, int draws, std::uint64_t seed);

struct StabilityEstimate {
  double lambda_hat = 0.0;
  double epsilon_hat = 0.0;
  double gamma_hat = 0.0;
  int sample_count = 0;
  bool converged = true;

  bool contractive() const { return lambda_hat < 1.0; }
  /// (gamma_hat + epsilon_hat) / (1 - lambda_hat); infinity when lambda >= 1.
  double bound() const;
};

struct BoundReport {
  StabilityEstimate estimate;
  double tail_mean_error = 0.0;  ///< tail mean of ||x_t - truth_t||_2
  double ratio = 0.0;            ///< tail_mean_error / bound
  /// Error split against the reference recursion run with the true model:
  /// tail means of ||reference - truth|| and ||analysis - reference||.
  std::optional<double> tail_reference_error;
  std::optional<double> tail_model_gap;

  std::string render() const;
};

/// Tail statistics of a run against the truth. Sequences must be aligned by
/// position with matching time indices; tail_fraction in (0, 1] selects the
/// trailing window. The optional reference sequence (the same recursion run
/// with the true model) adds the two-term error split.
BoundReport bound_check(std::span<const GridState> analyses,
                        std::span<const GridState> truth,
                        const StabilityEstimate& estimate, double tail_fraction,
                        std::span<const GridState> reference = {});

/// Euclidean norm of the full state vector.
double state_norm(const GridState& state);

}  // namespace gasm

#endif  // GASM_THEORY_HPP
