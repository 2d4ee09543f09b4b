/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file commands.hpp
/// The toolkit's commands. Each is a pure function of (config, run directory,
/// input run directories named by io.* keys): identical inputs produce
/// byte-identical artifacts. Return value is the process exit code (0 success,
/// 2 divergence detected); usage and I/O failures surface as ConfigError /
/// IoError and are mapped to exit codes 1 and 3 by the CLI driver.

#ifndef GASM_COMMANDS_HPP
#define GASM_COMMANDS_HPP

#include "gasm/config.hpp"
#include "gasm/runs.hpp"

namespace gasm {

/// Spin up and integrate the true model, writing snapshots/t{0..T}.grid.
int cmd_truth(const ExperimentConfig& config, const RunPaths& run);

/// Thin and perturb every truth snapshot into obs/t{index}.grid + meta.txt.
int cmd_observe(const ExperimentConfig& config, const RunPaths& run);

/// Run the surrogate filter (and optionally the reference recursion with the
/// true model) against persisted observations; writes analysis snapshots,
/// metrics.csv, and on divergence a diverged.txt marker (exit code 2, partial
/// metrics retained).
int cmd_assimilate(const ExperimentConfig& config, const RunPaths& run);

/// Initialization comparison tables and the ensemble minimum track; writes
/// forecasts/leads.csv, forecasts/track.csv, forecasts/track_crps.csv.
int cmd_forecast(const ExperimentConfig& config, const RunPaths& run);

/// Estimate contraction / defect / noise scales, check the accuracy bound
/// against the measured tail error, and write stability.txt. Linear-model
/// configs with full observation and a unit kernel additionally get a hard
/// PASS/FAIL comparison against the closed-form tail error.
int cmd_verify_theorem(const ExperimentConfig& config, const RunPaths& run);

/// Score an arbitrary persisted state sequence (metrics.estimate_dir) against
/// a truth run; writes metrics.csv.
int cmd_metrics(const ExperimentConfig& config, const RunPaths& run);

}  // namespace gasm

#endif  // GASM_COMMANDS_HPP
