/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// @file serial.hpp
/// Plain single-threaded reference implementations of the parallel kernels.
/// Written as direct loop transcriptions (the adjoint is a scatter here, not
/// the production gather), they stay deliberately independent of the OpenMP
/// paths so tests can compare the two and the benchmark can time them.

#ifndef GASM_SERIAL_HPP
#define GASM_SERIAL_HPP

#include <span>

#include "gasm/conv.hpp"
#include "gasm/grid.hpp"

namespace gasm::serial {

GridState convolve(const GridState& state, const GaussianKernel& kernel,
                   LonPadding lon_padding = LonPadding::Replicate);

GridState convolve_adjoint(const GridState& state, const GaussianKernel& kernel,
                           LonPadding lon_padding = LonPadding::Replicate);

double rmse(const GridState& estimate, const GridState& truth,
            std::span<const double> lat_weights);

}  // namespace gasm::serial

#endif  // GASM_SERIAL_HPP
