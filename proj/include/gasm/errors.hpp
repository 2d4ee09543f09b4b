/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef GASM_ERRORS_HPP
#define GASM_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gasm {

/// Mismatched geometries or vector lengths.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter value (nonpositive stride, bad offsets, ...).
class ParameterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state left the admissible range or became non-finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::int64_t time_index)
      : std::runtime_error(what), time_index_(time_index) {}
  std::int64_t time_index() const { return time_index_; }

 private:
  std::int64_t time_index_;
};

/// Observations fed to the filter out of order or with gaps.
class SequencingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Innovation matrix has a nonpositive diagonal entry.
class SingularGainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem too large for a dense diagnostic path.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Metric undefined for the given input (e.g. zero-norm reference field).
class UndefinedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration text or unknown key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File missing, unreadable, or structurally corrupt.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gasm

#endif  // GASM_ERRORS_HPP
