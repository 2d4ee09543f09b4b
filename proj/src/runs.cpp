/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/runs.hpp"

#include <fstream>

#include "gasm/errors.hpp"
#include "gasm/snapshot.hpp"

namespace gasm {

std::filesystem::path state_file(const std::filesystem::path& dir,
                                 std::int64_t time_index) {
  return dir / ("t" + std::to_string(time_index) + ".grid");
}

std::optional<std::int64_t> last_contiguous_index(const std::filesystem::path& dir,
                                                  std::int64_t first,
                                                  std::int64_t step) {
  if (step < 1) throw ParameterError("index step must be >= 1");
  if (!std::filesystem::exists(state_file(dir, first))) return std::nullopt;
  std::int64_t t = first;
  while (std::filesystem::exists(state_file(dir, t + step))) t += step;
  return t;
}

GridState load_state(const std::filesystem::path& dir, std::int64_t time_index) {
  const auto path = state_file(dir, time_index);
  GridState s = read_snapshot(path);
  if (s.time_index != time_index) {
    throw IoError("snapshot " + path.string() + " carries time index " +
                  std::to_string(s.time_index));
  }
  return s;
}

ObservationBatch load_observation(const std::filesystem::path& obs_dir,
                                  std::int64_t time_index, double noise_variance) {
  const GridState s = load_state(obs_dir, time_index);
  ObservationBatch batch;
  batch.values = s.values;
  batch.time_index = s.time_index;
  batch.noise_variance = noise_variance;
  return batch;
}

void write_resolved_config(const RunPaths& run, const ExperimentConfig& config) {
  std::filesystem::create_directories(run.root);
  std::ofstream out(run.config_file(), std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + run.config_file().string());
  const std::string text = config.to_kv().serialize();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("short write: " + run.config_file().string());
}

std::filesystem::path resolve_input_dir(const RunPaths& run,
                                        const std::string& configured) {
  if (configured.empty()) return run.root;
  return std::filesystem::path(configured);
}

}  // namespace gasm
