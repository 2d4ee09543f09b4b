/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/theory.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gasm/errors.hpp"
#include "gasm/metrics.hpp"
#include "gasm/rng.hpp"

namespace gasm {

double state_norm(const GridState& state) {
  double acc = 0.0;
  for (double v : state.values) acc += v * v;
  return std::sqrt(acc);
}

double default_fd_step(const GridState& x) {
  double inf = 0.0;
  for (double v : x.values) {
    const double a = std::abs(v);
    if (a > inf) inf = a;
  }
  return 1e-5 * (1.0 + inf);
}

GridState jvp(const Dynamics& dynamics, const GridState& x, const GridState& v,
              double h) {
  if (x.geometry != v.geometry) throw DimensionError("jvp geometry mismatch");
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  GridState plus = x;
  GridState minus = x;
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    plus.values[i] += h * v.values[i];
    minus.values[i] -= h * v.values[i];
  }
  const GridState fp = dynamics.step(plus);
  const GridState fm = dynamics.step(minus);
  GridState out = GridState::zeros(x.geometry, x.time_index);
  const double inv = 1.0 / (2.0 * h);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = (fp.values[i] - fm.values[i]) * inv;
  }
  return out;
}

StateMap make_residual_projector(const GainApplicator& gain) {
  return [gain](const GridState& w) {
    const std::vector<double> hw = apply_H(w, gain.op);
    const GridState khw = apply_gain(gain, hw, w.time_index);
    GridState out = w;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] -= khw.values[i];
    }
    return out;
  };
}

namespace {

/// Largest singular value of a dense column-major matrix via power iteration
/// on the Gram operator A^T A. Deterministic ramp start, capped iterations,
/// best Rayleigh quotient retained.
std::pair<double, bool> spectral_norm_dense(const std::vector<double>& a,
                                            std::int64_t dim,
                                            const SpectralOptions& options) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (std::int64_t i = 0; i < dim; ++i) {
    v[static_cast<std::size_t>(i)] = 1.0 + static_cast<double>(i) / (10.0 * dim);
  }
  auto normalize = [&](std::vector<double>& x) {
    double n = 0.0;
    for (double t : x) n += t * t;
    n = std::sqrt(n);
    if (n > 0.0) {
      for (double& t : x) t /= n;
    }
    return n;
  };
  normalize(v);

  std::vector<double> av(static_cast<std::size_t>(dim));
  std::vector<double> gram(static_cast<std::size_t>(dim));
  double best = 0.0;
  double prev = -1.0;
  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    // av = A v, gram = A^T av
    for (std::int64_t r = 0; r < dim; ++r) av[static_cast<std::size_t>(r)] = 0.0;
    for (std::int64_t c = 0; c < dim; ++c) {
      const double vc = v[static_cast<std::size_t>(c)];
      const double* col = a.data() + c * dim;
      for (std::int64_t r = 0; r < dim; ++r) {
        av[static_cast<std::size_t>(r)] += col[r] * vc;
      }
    }
    for (std::int64_t c = 0; c < dim; ++c) {
      const double* col = a.data() + c * dim;
      double acc = 0.0;
      for (std::int64_t r = 0; r < dim; ++r) {
        acc += col[r] * av[static_cast<std::size_t>(r)];
      }
      gram[static_cast<std::size_t>(c)] = acc;
    }
    // Rayleigh quotient of the Gram operator at unit v is ||A v||^2.
    double ray = 0.0;
    for (double t : av) ray += t * t;
    if (ray > best) best = ray;
    if (prev >= 0.0 && std::abs(ray - prev) <= options.rel_tolerance * ray) {
      converged = true;
      break;
    }
    prev = ray;
    v = gram;
    if (normalize(v) == 0.0) {
      converged = true;  // A is (numerically) zero
      break;
    }
  }
  return {std::sqrt(best), converged};
}

}  // namespace

ContractionEstimate contraction_estimate(const Dynamics& dynamics,
                                         const StateMap& projector,
                                         std::span<const GridState> samples,
                                         const SpectralOptions& options) {
  if (samples.empty()) throw ParameterError("contraction estimate needs samples");
  ContractionEstimate result;
  for (const GridState& x : samples) {
    const std::int64_t dim = x.geometry.size();
    if (dim > options.max_dimension) {
      throw CapacityError("state dimension " + std::to_string(dim) +
                          " exceeds dense-tangent limit " +
                          std::to_string(options.max_dimension));
    }
    const double h = default_fd_step(x);
    std::vector<double> a(static_cast<std::size_t>(dim) * dim);
    GridState e = GridState::zeros(x.geometry, x.time_index);
    for (std::int64_t c = 0; c < dim; ++c) {
      e.values[static_cast<std::size_t>(c)] = 1.0;
      const GridState col = projector(jvp(dynamics, x, e, h));
      for (std::int64_t r = 0; r < dim; ++r) {
        a[static_cast<std::size_t>(c * dim + r)] =
            col.values[static_cast<std::size_t>(r)];
      }
      e.values[static_cast<std::size_t>(c)] = 0.0;
    }
    const auto [norm, converged] = spectral_norm_dense(a, dim, options);
    if (norm > result.lambda_hat) result.lambda_hat = norm;
    result.converged = result.converged && converged;
  }
  return result;
}

double defect_estimate(const Dynamics& truth_model, const Dynamics& surrogate,
                       const StateMap& projector,
                       std::span<const GridState> samples) {
  if (samples.empty()) throw ParameterError("defect estimate needs samples");
  double sup = 0.0;
  for (const GridState& x : samples) {
    const GridState ft = truth_model.step(x);
    const GridState fs = surrogate.step(x);
    GridState diff = GridState::zeros(x.geometry, x.time_index);
    for (std::size_t i = 0; i < diff.values.size(); ++i) {
      diff.values[i] = fs.values[i] - ft.values[i];
    }
    const double norm = state_norm(projector(diff));
    if (norm > sup) sup = norm;
  }
  return sup;
}

double gamma_estimate(const GainApplicator& gain, int draws, std::uint64_t seed) {
  if (draws < 1) throw ParameterError("gamma estimate needs at least one draw");
  const double sd = std::sqrt(gain.r);
  if (sd == 0.0) return 0.0;
  RngStream rng(seed);
  std::vector<double> eta(gain.innovation_diag.size());
  double acc = 0.0;
  for (int d = 0; d < draws; ++d) {
    for (double& v : eta) v = sd * rng.next_normal();
    acc += state_norm(apply_gain(gain, eta));
  }
  return acc / draws;
}

double StabilityEstimate::bound() const {
  if (!(lambda_hat < 1.0)) return std::numeric_limits<double>::infinity();
  return (gamma_hat + epsilon_hat) / (1.0 - lambda_hat);
}

BoundReport bound_check(std::span<const GridState> analyses,
                        std::span<const GridState> truth,
                        const StabilityEstimate& estimate, double tail_fraction,
                        std::span<const GridState> reference) {
  if (analyses.empty()) throw ParameterError("bound check needs analyses");
  if (analyses.size() != truth.size()) {
    throw DimensionError("analysis and truth sequences differ in length");
  }
  if (!reference.empty() && reference.size() != analyses.size()) {
    throw DimensionError("reference sequence length mismatch");
  }
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ParameterError("tail fraction must lie in (0, 1]");
  }
  std::size_t start = analyses.size() -
                      static_cast<std::size_t>(
                          std::ceil(tail_fraction * analyses.size()));
  if (start >= analyses.size()) start = analyses.size() - 1;

  double err_acc = 0.0, ref_acc = 0.0, gap_acc = 0.0;
  std::size_t count = 0;
  for (std::size_t s = start; s < analyses.size(); ++s) {
    if (analyses[s].time_index != truth[s].time_index) {
      throw SequencingError("analysis/truth time indices differ at position " +
                            std::to_string(s));
    }
    GridState diff = analyses[s];
    for (std::size_t i = 0; i < diff.values.size(); ++i) {
      diff.values[i] -= truth[s].values[i];
    }
    err_acc += state_norm(diff);
    if (!reference.empty()) {
      GridState rdiff = reference[s];
      GridState gdiff = analyses[s];
      for (std::size_t i = 0; i < rdiff.values.size(); ++i) {
        rdiff.values[i] -= truth[s].values[i];
        gdiff.values[i] -= reference[s].values[i];
      }
      ref_acc += state_norm(rdiff);
      gap_acc += state_norm(gdiff);
    }
    ++count;
  }

  BoundReport report;
  report.estimate = estimate;
  report.tail_mean_error = err_acc / count;
  const double b = estimate.bound();
  report.ratio = b > 0.0 ? report.tail_mean_error / b : std::numeric_limits<double>::infinity();
  if (!reference.empty()) {
    report.tail_reference_error = ref_acc / count;
    report.tail_model_gap = gap_acc / count;
  }
  return report;
}

std::string BoundReport::render() const {
  std::string out;
  out += "contraction lambda_hat = " + format_double(estimate.lambda_hat) + "\n";
  out += "defect epsilon_hat = " + format_double(estimate.epsilon_hat) + "\n";
  out += "noise gamma_hat = " + format_double(estimate.gamma_hat) + "\n";
  out += "samples = " + std::to_string(estimate.sample_count) + "\n";
  out += "power_iteration_converged = ";
  out += estimate.converged ? "true" : "false";
  out += "\n";
  out += "contractive = ";
  out += estimate.contractive() ? "true" : "false";
  out += "\n";
  out += "bound = " + format_double(estimate.bound()) + "\n";
  out += "tail_mean_error = " + format_double(tail_mean_error) + "\n";
  out += "ratio = " + format_double(ratio) + "\n";
  if (tail_reference_error) {
    out += "tail_reference_error = " + format_double(*tail_reference_error) + "\n";
  }
  if (tail_model_gap) {
    out += "tail_model_gap = " + format_double(*tail_model_gap) + "\n";
  }
  return out;
}

}  // namespace gasm
