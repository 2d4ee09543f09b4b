/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file snapshot.hpp
/// Binary snapshot format for gridded states. Layout, all little-endian:
///   magic "GASM" | u32 format version | u32 n_features | u32 n_lat | u32 n_lon
///   | u64 time_index | n_lat f64 latitudes | f64 values (feature-major row-major)
/// Round trips are bit-exact, including NaN payloads.

#ifndef GASM_SNAPSHOT_HPP
#define GASM_SNAPSHOT_HPP

#include <filesystem>
#include <map>
#include <string>

#include "gasm/grid.hpp"

namespace gasm {

inline constexpr std::uint32_t kSnapshotFormatVersion = 1;

void write_snapshot(const std::filesystem::path& path, const GridState& state);
GridState read_snapshot(const std::filesystem::path& path);

/// Plain "key = value" sidecar files (observation metadata and the like).
void write_sidecar(const std::filesystem::path& path,
                   const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> read_sidecar(const std::filesystem::path& path);

}  // namespace gasm

#endif  // GASM_SNAPSHOT_HPP
