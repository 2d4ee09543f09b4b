/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file conv.hpp
/// Normalized square convolution stencils and their exact adjoints on gridded
/// states. Output pixel (i, j) of the forward pass gathers
///   sum_{a,b} w[a][b] * input(pad(i - m + a), pad(j - m + b)),   m = k / 2,
/// with replication padding in latitude and either replication or periodic
/// wrap in longitude. Stride is one and output size equals input size. Even
/// kernel sides keep their off-center peak (tap offset zero sits at index
/// k / 2), so an even-k pass both smooths and shifts by half a cell; callers
/// that want a symmetric response must pick odd k. The adjoint is the exact
/// matrix transpose of the forward pass under the chosen padding, which with
/// replication is NOT a flipped-kernel convolution: mass that the forward pass
/// reads from clamped edge cells is accumulated back onto those cells.

#ifndef GASM_CONV_HPP
#define GASM_CONV_HPP

#include <vector>

#include "gasm/grid.hpp"

namespace gasm {

/// k x k nonnegative stencil normalized to unit sum.
struct GaussianKernel {
  int size = 1;
  double sigma2 = 8.0;
  std::vector<double> weights;  ///< row-major k*k, sums to one

  double at(int a, int b) const { return weights[a * size + b]; }
  int center() const { return size / 2; }

  /// Truncated Gaussian: w[a][b] proportional to
  /// exp(-((a - m)^2 + (b - m)^2) / (2 sigma2)), normalized to unit sum.
  static GaussianKernel gaussian(int k, double sigma2);

  /// Arbitrary nonnegative stencil, normalized here to unit sum. Used for
  /// non-Gaussian weight patterns such as equal-weight averaging stencils.
  static GaussianKernel from_weights(int k, std::vector<double> weights);
};

enum class LonPadding {
  Replicate,  ///< clamp longitude indices to the grid edge
  Periodic,   ///< wrap longitude indices
};

/// Forward pass, applied independently to every feature plane.
GridState convolve(const GridState& state, const GaussianKernel& kernel,
                   LonPadding lon_padding = LonPadding::Replicate);

/// Exact transpose of convolve under the same kernel and padding:
/// <convolve(u), v> == <u, convolve_adjoint(v)> up to rounding.
GridState convolve_adjoint(const GridState& state, const GaussianKernel& kernel,
                           LonPadding lon_padding = LonPadding::Replicate);

/// Stabilization smoother: one forward pass with the fixed 4 x 4, sigma2 = 8
/// kernel. Longitude padding should match the topology of the field being
/// smoothed (periodic for cyclic model domains).
GridState smooth(const GridState& state,
                 LonPadding lon_padding = LonPadding::Replicate);

}  // namespace gasm

#endif  // GASM_CONV_HPP
