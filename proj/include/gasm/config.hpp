/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file config.hpp
/// Experiment configuration: a flat "key = value" text format with dotted
/// prefixes, a typed view with defaults, and builders that turn a config into
/// geometry, dynamics, and gain objects. Unknown keys are rejected; the
/// resolved form (all defaults materialized, keys sorted, canonical value
/// formatting) reparses to an identical config.

#ifndef GASM_CONFIG_HPP
#define GASM_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "gasm/covariance.hpp"
#include "gasm/dynamics.hpp"
#include "gasm/grid.hpp"
#include "gasm/obs.hpp"

namespace gasm {

/// Raw parsed key/value text. '#' starts a comment; blank lines are ignored;
/// duplicate keys are an error.
struct KeyValueConfig {
  std::map<std::string, std::string> entries;

  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig parse_file(const std::filesystem::path& path);
  std::string serialize() const;  ///< sorted "key = value" lines
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int runtime_threads = 0;  ///< 0 keeps the OpenMP default

  int grid_n_features = 1;
  int grid_n_lat = 8;
  int grid_n_lon = 16;
  std::string grid_lat_scheme = "centers";  ///< "centers" or "spanned"
  double grid_lat_north = 90.0;
  double grid_lat_south = -90.0;

  std::string model_kind = "lorenz96";  ///< lorenz96 | advection2d | linear
  int model_n = 40;
  double model_forcing = 8.0;
  double model_dt = 0.05;
  int model_substeps = 1;
  double model_u = 0.5;
  double model_v = 0.0;
  double model_diffusion = 0.05;
  bool model_periodic_lon = true;
  int model_dim = 1;
  double model_scale = 0.9;

  double surrogate_parameter_bias = 0.0;
  double surrogate_additive_bias = 0.0;
  bool surrogate_smoothing = false;

  int truth_horizon = 100;
  int truth_spinup = 0;
  double truth_init_amplitude = 1.0;

  int obs_stride = 2;
  int obs_lat_offset = 0;
  int obs_lon_offset = 0;
  double obs_noise_variance = 1e-4;

  int kernel_size = 0;       ///< 0 means "use obs.stride"
  double kernel_sigma2 = 8.0;
  double covariance_q = 0.0;       ///< 0 means "use the default normalization"
  double covariance_sigma2 = 0.0;  ///< 0 means "same as kernel.sigma2"

  int filter_horizon = 0;  ///< 0 means "all available observations"
  bool filter_operational = false;
  bool filter_divergence_check = true;

  int io_cadence = 1;
  std::string io_truth_dir;
  std::string io_obs_dir;
  std::string io_analysis_dir;
  std::string io_operational_dir;

  int forecast_horizon = 8;
  int forecast_start_stride = 4;
  bool forecast_smoothing = false;
  int forecast_ensemble_size = 50;
  double forecast_perturbation_std = 0.3;
  bool forecast_control_member = false;
  int forecast_track_feature = 0;
  std::int64_t forecast_track_start = 1;
  int forecast_track_lat_lo = -1;  ///< -1 means "whole grid"
  int forecast_track_lat_hi = -1;
  int forecast_track_lon_lo = -1;
  int forecast_track_lon_hi = -1;

  int theory_samples = 50;
  int theory_sample_stride = 0;  ///< 0 derives one from the run length
  int theory_power_iterations = 200;
  double theory_tail_fraction = 0.5;
  int theory_noise_draws = 256;

  std::string metrics_estimate_dir;
  bool metrics_acc_symmetric = false;

  static ExperimentConfig from_kv(const KeyValueConfig& kv);
  static ExperimentConfig load(const std::filesystem::path& path);
  KeyValueConfig to_kv() const;  ///< fully resolved (defaults materialized)

  /// Semantic checks beyond per-key parsing; throws ConfigError.
  void validate() const;

  /// State geometry implied by the model kind.
  GridGeometry build_geometry() const;
  int effective_kernel_size() const;
  GaussianKernel build_kernel() const;
  BackgroundCovariance build_covariance() const;
  ThinningOperator build_thinning(const GridGeometry& g) const;

  std::shared_ptr<const Dynamics> build_true_dynamics() const;
  std::shared_ptr<const Dynamics> build_surrogate_dynamics() const;
  /// Forecast model: the surrogate base (biased parameters, additive bias)
  /// with smoothing controlled by forecast.smoothing.
  std::shared_ptr<const Dynamics> build_forecast_dynamics() const;
};

}  // namespace gasm

#endif  // GASM_CONFIG_HPP
