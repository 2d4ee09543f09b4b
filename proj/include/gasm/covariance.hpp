/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file covariance.hpp
/// Structured background covariance C = q B B^T, where B is the replication-
/// padded convolution with a normalized kernel, and the resulting analysis
/// gain K = C H^T (H C H^T + R)^-1 with R = r I. When the kernel side equals
/// the thinning stride, distinct observed points read disjoint input cells, so
/// H C H^T is exactly diagonal and the gain reduces to one elementwise divide
/// plus one adjoint and one forward convolve. The gain stores only that
/// diagonal; for kernel/stride pairings that do not make H C H^T diagonal it
/// is therefore the diagonal-innovation approximation of the exact gain
/// (verify_diagonal audits the pairing).

#ifndef GASM_COVARIANCE_HPP
#define GASM_COVARIANCE_HPP

#include <span>
#include <vector>

#include "gasm/conv.hpp"
#include "gasm/grid.hpp"
#include "gasm/obs.hpp"

namespace gasm {

/// Scale normalization q = 0.5 / sum_{a,b} w[a][b]^2, which makes the largest
/// diagonal entry of C equal to one half on interior cells.
double default_q(const GaussianKernel& kernel);

struct BackgroundCovariance {
  GaussianKernel kernel;
  double q = 0.5;

  static BackgroundCovariance with_default_q(const GaussianKernel& kernel);
};

/// C v = q * B (B^T v), i.e. adjoint pass then forward pass, scaled by q.
GridState apply_C(const BackgroundCovariance& cov, const GridState& v);

struct GainApplicator {
  BackgroundCovariance covariance;
  ThinningOperator op;
  double r = 0.0;
  /// Diagonal of H C H^T + R, length op.obs_size().
  std::vector<double> innovation_diag;
};

/// Precomputes the innovation diagonal (H C H^T)_ii + r. Each entry is
/// q ||B^T H^T e_i||^2 + r, evaluated with one adjoint pass per distinct
/// boundary class: interior observed points all share one value, and points
/// near an edge are keyed by their clamped distance to it. Throws
/// SingularGainError if any entry is nonpositive.
GainApplicator build_gain(const BackgroundCovariance& cov,
                          const ThinningOperator& op, double r);

/// K * innovation = C H^T diag^-1 * innovation as a gridded increment.
GridState apply_gain(const GainApplicator& gain, std::span<const double> innovation,
                     std::int64_t time_index = 0);

struct DiagonalityReport {
  bool exactly_diagonal = false;
  double max_off_diagonal = 0.0;
  std::int64_t dimension = 0;  ///< observed points per feature (one spatial block)
};

/// Densely assembles one spatial block of H C H^T by probing apply_C with unit
/// impulses (the operator acts identically and independently on every feature
/// plane) and reports whether every off-diagonal entry is exactly zero.
/// Guarded: throws CapacityError if the spatial grid exceeds 64 x 64.
DiagonalityReport verify_diagonal(const BackgroundCovariance& cov,
                                  const ThinningOperator& op);

}  // namespace gasm

#endif  // GASM_COVARIANCE_HPP
