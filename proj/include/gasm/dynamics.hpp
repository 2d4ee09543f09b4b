/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file dynamics.hpp
/// Forward models advancing a gridded state by one assimilation cycle. All
/// implementations are deterministic, keep the geometry fixed, increment
/// time_index by one, and throw DivergenceError when a step produces
/// non-finite values.

#ifndef GASM_DYNAMICS_HPP
#define GASM_DYNAMICS_HPP

#include <memory>
#include <optional>
#include <string>

#include "gasm/conv.hpp"
#include "gasm/grid.hpp"

namespace gasm {

class Dynamics {
 public:
  virtual ~Dynamics() = default;
  virtual GridState step(const GridState& state) const = 0;
  virtual std::string descriptor() const = 0;
};

/// Cyclic Lorenz-96 system dx_i/dt = (x_{i+1} - x_{i-2}) x_{i-1} - x_i + F,
/// integrated with classical fourth-order Runge-Kutta. One assimilation cycle
/// advances substeps * dt model time. States live on a 1-feature, 1-latitude,
/// n-longitude grid, with the cyclic index running along longitude.
struct Lorenz96Config {
  int n = 40;
  double forcing = 8.0;
  double dt = 0.05;
  int substeps = 1;
};

class Lorenz96 : public Dynamics {
 public:
  explicit Lorenz96(const Lorenz96Config& config);
  GridState step(const GridState& state) const override;
  std::string descriptor() const override;
  const Lorenz96Config& config() const { return config_; }
  static GridGeometry geometry(int n);

 private:
  Lorenz96Config config_;
};

/// Semi-Lagrangian advection with bilinear interpolation plus one blended
/// diffusion pass per substep. Velocities (u, v) are in grid cells per cycle
/// (u along longitude, v along latitude toward the south); each substep must
/// move at most one cell per axis. Longitude wraps when periodic_lon is set,
/// latitude always replicates at the poles. Diffusion blends the shifted field
/// with its 3 x 3 normalized-kernel convolution: x <- (1 - d) x + d conv(x).
struct Advection2DConfig {
  double u = 0.0;
  double v = 0.0;
  double diffusion = 0.0;  ///< in [0, 1]
  bool periodic_lon = false;
  int substeps = 1;
};

class Advection2D : public Dynamics {
 public:
  explicit Advection2D(const Advection2DConfig& config);
  GridState step(const GridState& state) const override;
  std::string descriptor() const override;
  const Advection2DConfig& config() const { return config_; }

 private:
  Advection2DConfig config_;
};

/// x <- scale * x on every coordinate. The exact linear testbed behind the
/// closed-form accuracy oracle.
struct DiagonalLinearConfig {
  int dim = 1;
  double scale = 0.9;
};

class DiagonalLinear : public Dynamics {
 public:
  explicit DiagonalLinear(const DiagonalLinearConfig& config);
  GridState step(const GridState& state) const override;
  std::string descriptor() const override;
  const DiagonalLinearConfig& config() const { return config_; }
  static GridGeometry geometry(int dim);

 private:
  DiagonalLinearConfig config_;
};

/// Imperfect forecast model: a base step (normally built with deliberately
/// biased parameters), an optional additive bias field, and an optional
/// stabilization smoothing pass applied after the base step. With no bias
/// field and smoothing off, step() is bit-identical to the base step.
class SurrogateDynamics : public Dynamics {
 public:
  SurrogateDynamics(std::shared_ptr<const Dynamics> base,
                    std::optional<GridState> additive_bias, bool apply_smoothing,
                    double parameter_bias = 0.0,
                    LonPadding smoothing_padding = LonPadding::Replicate);
  GridState step(const GridState& state) const override;
  std::string descriptor() const override;
  const Dynamics& base() const { return *base_; }
  double parameter_bias() const { return parameter_bias_; }
  bool smoothing() const { return apply_smoothing_; }

 private:
  std::shared_ptr<const Dynamics> base_;
  std::optional<GridState> additive_bias_;
  bool apply_smoothing_;
  double parameter_bias_;
  LonPadding smoothing_padding_;
};

}  // namespace gasm

#endif  // GASM_DYNAMICS_HPP
