/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// Benchmark comparing the parallel convolution kernels against the serial
/// reference implementations kept for testing.  Not registered with ctest;
/// run it by hand:
///
///   build/tools/gasm-bench [n_lat] [n_lon] [repeats]

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gasm/conv.hpp"
#include "gasm/grid.hpp"
#include "gasm/metrics.hpp"
#include "gasm/rng.hpp"
#include "gasm/serial.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename Fn>
double time_best_of(int repeats, Fn&& fn) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto start = Clock::now();
    fn();
    best = std::min(best, seconds_since(start));
  }
  return best;
}

void report(const std::string& name, double serial, double parallel) {
  std::cout << name << ": serial " << serial * 1e3 << " ms, parallel "
            << parallel * 1e3 << " ms, speedup " << serial / parallel << "x\n";
}

}  // namespace

int main(int argc, char** argv) {
  int n_lat = argc > 1 ? std::atoi(argv[1]) : 360;
  int n_lon = argc > 2 ? std::atoi(argv[2]) : 720;
  int repeats = argc > 3 ? std::atoi(argv[3]) : 5;
  if (n_lat < 1 || n_lon < 1 || repeats < 1) {
    std::cerr << "usage: gasm-bench [n_lat] [n_lon] [repeats]\n";
    return 1;
  }

#ifdef _OPENMP
  std::cout << "threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "threads: 1 (built without OpenMP)\n";
#endif
  std::cout << "grid: 3 x " << n_lat << " x " << n_lon << ", best of "
            << repeats << "\n";

  const gasm::GridGeometry g = gasm::GridGeometry::regular(3, n_lat, n_lon);
  gasm::GridState state = gasm::GridState::zeros(g, 0);
  gasm::RngStream rng(2026);
  for (double& v : state.values) v = rng.next_normal();

  const gasm::GaussianKernel kernel = gasm::GaussianKernel::gaussian(9, 8.0);

  gasm::GridState sink = state;
  const double conv_serial = time_best_of(repeats, [&] {
    sink = gasm::serial::convolve(state, kernel, gasm::LonPadding::Replicate);
  });
  const double conv_parallel = time_best_of(repeats, [&] {
    sink = gasm::convolve(state, kernel, gasm::LonPadding::Replicate);
  });
  report("convolve 9x9", conv_serial, conv_parallel);

  const double adj_serial = time_best_of(repeats, [&] {
    sink = gasm::serial::convolve_adjoint(state, kernel, gasm::LonPadding::Replicate);
  });
  const double adj_parallel = time_best_of(repeats, [&] {
    sink = gasm::convolve_adjoint(state, kernel, gasm::LonPadding::Replicate);
  });
  report("adjoint 9x9", adj_serial, adj_parallel);

  gasm::GridState other = state;
  for (double& v : other.values) v += 0.1 * rng.next_normal();
  const std::vector<double> weights = gasm::latitude_weights(g);
  double value = 0.0;
  const double rmse_serial =
      time_best_of(repeats, [&] { value = gasm::serial::rmse(state, other, weights); });
  const double rmse_parallel =
      time_best_of(repeats, [&] { value = gasm::rmse(state, other, weights); });
  report("weighted rmse", rmse_serial, rmse_parallel);

  // Keep the optimizer honest.
  std::cout << "checksum: " << sink.values[0] + value << "\n";
  return 0;
}
