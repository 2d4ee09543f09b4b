/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef GASM_TESTS_TEST_SUPPORT_HPP
#define GASM_TESTS_TEST_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gasm/grid.hpp"
#include "gasm/rng.hpp"

namespace testsup {

/// Deterministic pseudo-random field for exercising linear-algebra identities.
inline gasm::GridState random_state(const gasm::GridGeometry& g,
                                    std::uint64_t seed, double scale = 1.0,
                                    std::int64_t time_index = 0) {
  gasm::GridState s = gasm::GridState::zeros(g, time_index);
  gasm::RngStream rng(seed);
  for (double& v : s.values) v = scale * rng.next_normal();
  return s;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed,
                                         double scale = 1.0) {
  std::vector<double> v(n);
  gasm::RngStream rng(seed);
  for (double& x : v) x = scale * rng.next_normal();
  return v;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace testsup

#endif  // GASM_TESTS_TEST_SUPPORT_HPP
