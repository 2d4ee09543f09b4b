/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef GASM_RNG_HPP
#define GASM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace gasm {

/// Purpose tags for deriving independent random streams from one root seed.
enum class RngPurpose : std::uint64_t {
  TruthInit = 1,
  ObserveNoise = 2,
  EnsemblePerturb = 3,
  TheoryNoise = 4,
  Probe = 5,
};

/// Counter-style generator (SplitMix64 core). Every consumer derives its own
/// stream from (root seed, purpose, time index, member), so adding members or
/// extending a run never perturbs the draws of existing streams. Normal
/// variates use Box-Muller on open-interval uniforms; nothing here depends on
/// standard-library distribution internals, which keeps reruns byte-identical.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  static RngStream split(std::uint64_t root, RngPurpose purpose,
                         std::int64_t time_index = 0, std::int64_t member = 0) {
    std::uint64_t h = mix(root);
    h = mix(h ^ static_cast<std::uint64_t>(purpose));
    h = mix(h ^ static_cast<std::uint64_t>(time_index));
    h = mix(h ^ static_cast<std::uint64_t>(member));
    return RngStream(h);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform draw in (0, 1].
  double next_uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal draw.
  double next_normal() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace gasm

#endif  // GASM_RNG_HPP
