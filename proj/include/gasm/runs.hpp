/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file runs.hpp
/// Run directory layout. A run directory holds the artifacts of one command:
///   config.resolved          effective configuration
///   snapshots/t{index}.grid  truth states
///   obs/t{index}.grid        observations (+ obs/meta.txt sidecar)
///   analysis/t{index}.grid   assimilated states
///   operational/t{index}.grid  reference recursion states
///   metrics.csv, stability.txt, forecasts/*.csv
/// Commands reading another run's outputs locate them through io.* config
/// keys, which default to the command's own run directory.

#ifndef GASM_RUNS_HPP
#define GASM_RUNS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>

#include "gasm/config.hpp"
#include "gasm/grid.hpp"
#include "gasm/obs.hpp"

namespace gasm {

struct RunPaths {
  std::filesystem::path root;

  std::filesystem::path config_file() const { return root / "config.resolved"; }
  std::filesystem::path snapshot_dir() const { return root / "snapshots"; }
  std::filesystem::path obs_dir() const { return root / "obs"; }
  std::filesystem::path analysis_dir() const { return root / "analysis"; }
  std::filesystem::path operational_dir() const { return root / "operational"; }
  std::filesystem::path forecast_dir() const { return root / "forecasts"; }
  std::filesystem::path metrics_file() const { return root / "metrics.csv"; }
  std::filesystem::path stability_file() const { return root / "stability.txt"; }
  std::filesystem::path obs_meta_file() const { return obs_dir() / "meta.txt"; }
};

/// snapshots/t{index}.grid style paths.
std::filesystem::path state_file(const std::filesystem::path& dir,
                                 std::int64_t time_index);

/// Largest time index reachable from `first` in increments of `step` with
/// every intermediate file present, or nullopt if even `first` is missing.
std::optional<std::int64_t> last_contiguous_index(const std::filesystem::path& dir,
                                                  std::int64_t first,
                                                  std::int64_t step = 1);

GridState load_state(const std::filesystem::path& dir, std::int64_t time_index);

/// Observation batches are persisted as snapshots on the thinned geometry;
/// noise variance travels in the obs/meta.txt sidecar.
ObservationBatch load_observation(const std::filesystem::path& obs_dir,
                                  std::int64_t time_index, double noise_variance);

/// Writes config.resolved (canonical resolved form).
void write_resolved_config(const RunPaths& run, const ExperimentConfig& config);

/// Input-run resolution: the configured directory if nonempty, else this run.
std::filesystem::path resolve_input_dir(const RunPaths& run,
                                        const std::string& configured);

}  // namespace gasm

#endif  // GASM_RUNS_HPP
