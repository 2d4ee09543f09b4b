/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/forecast.hpp"

#include <algorithm>
#include <cmath>

#include "gasm/errors.hpp"
#include "gasm/rng.hpp"

namespace gasm {

std::vector<GridState> make_ensemble(const GridState& init,
                                     const EnsembleConfig& config) {
  if (config.size < 1) throw ParameterError("ensemble size must be >= 1");
  if (!(config.perturbation_std >= 0.0)) {
    throw ParameterError("perturbation std must be nonnegative");
  }
  std::vector<GridState> members;
  members.reserve(static_cast<std::size_t>(config.size));
  for (int m = 0; m < config.size; ++m) {
    GridState member = init;
    if (config.perturbation_std > 0.0 && !(config.control_member && m == 0)) {
      RngStream rng = RngStream::split(config.seed, RngPurpose::EnsemblePerturb,
                                       init.time_index, m);
      for (double& v : member.values) {
        v += config.perturbation_std * rng.next_normal();
      }
    }
    members.push_back(std::move(member));
  }
  return members;
}

std::vector<GridState> rollout(const GridState& init, const Dynamics& dynamics,
                               int horizon) {
  if (horizon < 0) throw ParameterError("forecast horizon must be nonnegative");
  std::vector<GridState> states;
  states.reserve(static_cast<std::size_t>(horizon));
  GridState x = init;
  for (int l = 0; l < horizon; ++l) {
    x = dynamics.step(x);
    states.push_back(x);
  }
  return states;
}

GridPoint track_minimum(const GridState& field, const std::optional<Region>& region) {
  const auto& g = field.geometry;
  if (g.n_features != 1) {
    throw DimensionError("track_minimum expects a single-feature field");
  }
  Region r{0, g.n_lat - 1, 0, g.n_lon - 1};
  if (region) {
    r = *region;
    if (r.lat_lo < 0 || r.lat_hi >= g.n_lat || r.lat_lo > r.lat_hi ||
        r.lon_lo < 0 || r.lon_hi >= g.n_lon || r.lon_lo > r.lon_hi) {
      throw ParameterError("track region out of bounds");
    }
  }
  GridPoint best{r.lat_lo, r.lon_lo, field.at(0, r.lat_lo, r.lon_lo)};
  for (int i = r.lat_lo; i <= r.lat_hi; ++i) {
    for (int j = r.lon_lo; j <= r.lon_hi; ++j) {
      const double v = field.at(0, i, j);
      if (v < best.value) best = GridPoint{i, j, v};
    }
  }
  return best;
}

std::string to_string(InitializationKind kind) {
  switch (kind) {
    case InitializationKind::InterpolatedObservations:
      return "interpolated_observations";
    case InitializationKind::Truth:
      return "truth";
    case InitializationKind::Analysis:
      return "analysis";
    case InitializationKind::Climatology:
      return "climatology";
  }
  throw ParameterError("unknown initialization kind");
}

double quantile(std::vector<double> sample, double q) {
  if (sample.empty()) throw ParameterError("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("quantile level out of [0, 1]");
  std::sort(sample.begin(), sample.end());
  const double pos = q * static_cast<double>(sample.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= sample.size()) return sample.back();
  const double frac = pos - static_cast<double>(lo);
  return sample[lo] + frac * (sample[lo + 1] - sample[lo]);
}

std::string InitializationComparison::to_csv() const {
  std::string out = "init_kind,metric,lead,mean,q05,q95\n";
  for (const auto& row : rows) {
    out += to_string(row.kind);
    out += ',';
    out += row.metric;
    out += ',';
    out += std::to_string(row.lead);
    out += ',';
    out += format_double(row.mean);
    out += ',';
    out += format_double(row.q05);
    out += ',';
    out += format_double(row.q95);
    out += '\n';
  }
  return out;
}

InitializationComparison compare_initializations(
    const SequenceView& truth, const SequenceView& analyses,
    const std::function<ObservationBatch(std::int64_t)>& observations,
    const GridState& climatology, const Dynamics& forecast_model,
    const ThinningOperator& op, const GaussianKernel& interp_kernel, int horizon,
    int start_stride) {
  if (horizon < 0) throw ParameterError("forecast horizon must be nonnegative");
  if (start_stride < 1) throw ParameterError("start stride must be >= 1");

  const std::vector<InitializationKind> kinds = {
      InitializationKind::InterpolatedObservations, InitializationKind::Truth,
      InitializationKind::Analysis, InitializationKind::Climatology};

  std::vector<std::int64_t> starts;
  for (std::int64_t t = analyses.first; t + horizon <= truth.last;
       t += start_stride) {
    starts.push_back(t);
  }
  if (starts.empty()) {
    throw ParameterError("no forecast start times fit the horizon");
  }

  const std::vector<double> weights = latitude_weights(climatology.geometry);

  // scores[kind][metric][lead] -> per-start values
  std::vector<std::vector<std::vector<std::vector<double>>>> scores(
      kinds.size(),
      std::vector<std::vector<std::vector<double>>>(
          2, std::vector<std::vector<double>>(static_cast<std::size_t>(horizon) + 1)));

  for (const std::int64_t t : starts) {
    for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
      GridState init;
      switch (kinds[ki]) {
        case InitializationKind::InterpolatedObservations:
          init = interpolate_baseline(observations(t), op, interp_kernel);
          break;
        case InitializationKind::Truth:
          init = truth.at(t);
          break;
        case InitializationKind::Analysis:
          init = analyses.at(t);
          break;
        case InitializationKind::Climatology:
          init = climatology;
          init.time_index = t;
          break;
      }
      GridState x = init;
      for (int lead = 0; lead <= horizon; ++lead) {
        if (lead > 0) x = forecast_model.step(x);
        const GridState ref = truth.at(t + lead);
        scores[ki][0][static_cast<std::size_t>(lead)].push_back(
            rmse(x, ref, weights));
        scores[ki][1][static_cast<std::size_t>(lead)].push_back(
            acc(x, ref, weights));
      }
    }
  }

  InitializationComparison cmp;
  const char* metric_names[2] = {"rmse", "acc"};
  for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
    for (int metric = 0; metric < 2; ++metric) {
      for (int lead = 0; lead <= horizon; ++lead) {
        const auto& vals = scores[ki][metric][static_cast<std::size_t>(lead)];
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        cmp.rows.push_back(LeadRow{kinds[ki], metric_names[metric], lead, mean,
                                   quantile(vals, 0.05), quantile(vals, 0.95)});
      }
    }
  }
  return cmp;
}

}  // namespace gasm
