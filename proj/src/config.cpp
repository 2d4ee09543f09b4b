/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "gasm/errors.hpp"
#include "gasm/metrics.hpp"

namespace gasm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

/// Tracks which keys a typed read consumed so leftovers can be rejected.
class Reader {
 public:
  explicit Reader(const KeyValueConfig& kv) : kv_(kv) {}

  std::string get_string(const std::string& key, const std::string& dflt) {
    auto it = kv_.entries.find(key);
    seen_.insert(key);
    return it == kv_.entries.end() ? dflt : it->second;
  }

  bool get_bool(const std::string& key, bool dflt) {
    const std::string raw = get_string(key, dflt ? "true" : "false");
    if (raw == "true") return true;
    if (raw == "false") return false;
    throw ConfigError("key '" + key + "' expects true or false, got '" + raw + "'");
  }

  std::int64_t get_int(const std::string& key, std::int64_t dflt) {
    const std::string raw = get_string(key, std::to_string(dflt));
    try {
      std::size_t pos = 0;
      const std::int64_t v = std::stoll(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' expects an integer, got '" + raw + "'");
    }
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) {
    const std::string raw = get_string(key, std::to_string(dflt));
    try {
      // stoull silently wraps negative input, so reject it up front.
      if (raw.find('-') != std::string::npos) throw std::invalid_argument(raw);
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' expects an unsigned integer, got '" +
                        raw + "'");
    }
  }

  double get_double(const std::string& key, double dflt) {
    const std::string raw = get_string(key, format_double(dflt));
    try {
      std::size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' expects a number, got '" + raw + "'");
    }
  }

  void reject_unknown() const {
    for (const auto& [key, value] : kv_.entries) {
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
  }

 private:
  const KeyValueConfig& kv_;
  std::set<std::string> seen_;
};

int narrow_int(std::int64_t v, const std::string& key) {
  if (v < INT32_MIN || v > INT32_MAX) {
    throw ConfigError("key '" + key + "' out of range");
  }
  return static_cast<int>(v);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    if (kv.entries.count(key)) {
      throw ConfigError("duplicate config key '" + key + "'");
    }
    kv.entries[key] = value;
  }
  return kv;
}

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse(text);
}

std::string KeyValueConfig::serialize() const {
  std::string out;
  for (const auto& [key, value] : entries) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig& kv) {
  Reader r(kv);
  ExperimentConfig c;
  c.seed = r.get_u64("seed", c.seed);
  c.runtime_threads = narrow_int(r.get_int("runtime.threads", c.runtime_threads),
                                 "runtime.threads");

  c.grid_n_features =
      narrow_int(r.get_int("grid.n_features", c.grid_n_features), "grid.n_features");
  c.grid_n_lat = narrow_int(r.get_int("grid.n_lat", c.grid_n_lat), "grid.n_lat");
  c.grid_n_lon = narrow_int(r.get_int("grid.n_lon", c.grid_n_lon), "grid.n_lon");
  c.grid_lat_scheme = r.get_string("grid.lat_scheme", c.grid_lat_scheme);
  c.grid_lat_north = r.get_double("grid.lat_north", c.grid_lat_north);
  c.grid_lat_south = r.get_double("grid.lat_south", c.grid_lat_south);

  c.model_kind = r.get_string("model.kind", c.model_kind);
  c.model_n = narrow_int(r.get_int("model.n", c.model_n), "model.n");
  c.model_forcing = r.get_double("model.forcing", c.model_forcing);
  c.model_dt = r.get_double("model.dt", c.model_dt);
  c.model_substeps =
      narrow_int(r.get_int("model.substeps", c.model_substeps), "model.substeps");
  c.model_u = r.get_double("model.u", c.model_u);
  c.model_v = r.get_double("model.v", c.model_v);
  c.model_diffusion = r.get_double("model.diffusion", c.model_diffusion);
  c.model_periodic_lon = r.get_bool("model.periodic_lon", c.model_periodic_lon);
  c.model_dim = narrow_int(r.get_int("model.dim", c.model_dim), "model.dim");
  c.model_scale = r.get_double("model.scale", c.model_scale);

  c.surrogate_parameter_bias =
      r.get_double("surrogate.parameter_bias", c.surrogate_parameter_bias);
  c.surrogate_additive_bias =
      r.get_double("surrogate.additive_bias", c.surrogate_additive_bias);
  c.surrogate_smoothing = r.get_bool("surrogate.smoothing", c.surrogate_smoothing);

  c.truth_horizon =
      narrow_int(r.get_int("truth.horizon", c.truth_horizon), "truth.horizon");
  c.truth_spinup =
      narrow_int(r.get_int("truth.spinup", c.truth_spinup), "truth.spinup");
  c.truth_init_amplitude =
      r.get_double("truth.init_amplitude", c.truth_init_amplitude);

  c.obs_stride = narrow_int(r.get_int("obs.stride", c.obs_stride), "obs.stride");
  c.obs_lat_offset =
      narrow_int(r.get_int("obs.lat_offset", c.obs_lat_offset), "obs.lat_offset");
  c.obs_lon_offset =
      narrow_int(r.get_int("obs.lon_offset", c.obs_lon_offset), "obs.lon_offset");
  c.obs_noise_variance =
      r.get_double("obs.noise_variance", c.obs_noise_variance);

  c.kernel_size = narrow_int(r.get_int("kernel.size", c.kernel_size), "kernel.size");
  c.kernel_sigma2 = r.get_double("kernel.sigma2", c.kernel_sigma2);
  c.covariance_q = r.get_double("covariance.q", c.covariance_q);
  c.covariance_sigma2 = r.get_double("covariance.sigma2", c.covariance_sigma2);

  c.filter_horizon =
      narrow_int(r.get_int("filter.horizon", c.filter_horizon), "filter.horizon");
  c.filter_operational = r.get_bool("filter.operational", c.filter_operational);
  c.filter_divergence_check =
      r.get_bool("filter.divergence_check", c.filter_divergence_check);

  c.io_cadence = narrow_int(r.get_int("io.cadence", c.io_cadence), "io.cadence");
  c.io_truth_dir = r.get_string("io.truth_dir", c.io_truth_dir);
  c.io_obs_dir = r.get_string("io.obs_dir", c.io_obs_dir);
  c.io_analysis_dir = r.get_string("io.analysis_dir", c.io_analysis_dir);
  c.io_operational_dir = r.get_string("io.operational_dir", c.io_operational_dir);

  c.forecast_horizon =
      narrow_int(r.get_int("forecast.horizon", c.forecast_horizon), "forecast.horizon");
  c.forecast_start_stride = narrow_int(
      r.get_int("forecast.start_stride", c.forecast_start_stride),
      "forecast.start_stride");
  c.forecast_smoothing = r.get_bool("forecast.smoothing", c.forecast_smoothing);
  c.forecast_ensemble_size = narrow_int(
      r.get_int("forecast.ensemble_size", c.forecast_ensemble_size),
      "forecast.ensemble_size");
  c.forecast_perturbation_std =
      r.get_double("forecast.perturbation_std", c.forecast_perturbation_std);
  c.forecast_control_member =
      r.get_bool("forecast.control_member", c.forecast_control_member);
  c.forecast_track_feature = narrow_int(
      r.get_int("forecast.track_feature", c.forecast_track_feature),
      "forecast.track_feature");
  c.forecast_track_start =
      r.get_int("forecast.track_start", c.forecast_track_start);
  c.forecast_track_lat_lo = narrow_int(
      r.get_int("forecast.track_lat_lo", c.forecast_track_lat_lo),
      "forecast.track_lat_lo");
  c.forecast_track_lat_hi = narrow_int(
      r.get_int("forecast.track_lat_hi", c.forecast_track_lat_hi),
      "forecast.track_lat_hi");
  c.forecast_track_lon_lo = narrow_int(
      r.get_int("forecast.track_lon_lo", c.forecast_track_lon_lo),
      "forecast.track_lon_lo");
  c.forecast_track_lon_hi = narrow_int(
      r.get_int("forecast.track_lon_hi", c.forecast_track_lon_hi),
      "forecast.track_lon_hi");

  c.theory_samples =
      narrow_int(r.get_int("theory.samples", c.theory_samples), "theory.samples");
  c.theory_sample_stride = narrow_int(
      r.get_int("theory.sample_stride", c.theory_sample_stride),
      "theory.sample_stride");
  c.theory_power_iterations = narrow_int(
      r.get_int("theory.power_iterations", c.theory_power_iterations),
      "theory.power_iterations");
  c.theory_tail_fraction =
      r.get_double("theory.tail_fraction", c.theory_tail_fraction);
  c.theory_noise_draws = narrow_int(
      r.get_int("theory.noise_draws", c.theory_noise_draws), "theory.noise_draws");

  c.metrics_estimate_dir =
      r.get_string("metrics.estimate_dir", c.metrics_estimate_dir);
  c.metrics_acc_symmetric =
      r.get_bool("metrics.acc_symmetric", c.metrics_acc_symmetric);

  r.reject_unknown();
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  return from_kv(KeyValueConfig::parse_file(path));
}

KeyValueConfig ExperimentConfig::to_kv() const {
  KeyValueConfig kv;
  auto& e = kv.entries;
  e["seed"] = std::to_string(seed);
  e["runtime.threads"] = std::to_string(runtime_threads);

  e["grid.n_features"] = std::to_string(grid_n_features);
  e["grid.n_lat"] = std::to_string(grid_n_lat);
  e["grid.n_lon"] = std::to_string(grid_n_lon);
  e["grid.lat_scheme"] = grid_lat_scheme;
  e["grid.lat_north"] = format_double(grid_lat_north);
  e["grid.lat_south"] = format_double(grid_lat_south);

  e["model.kind"] = model_kind;
  e["model.n"] = std::to_string(model_n);
  e["model.forcing"] = format_double(model_forcing);
  e["model.dt"] = format_double(model_dt);
  e["model.substeps"] = std::to_string(model_substeps);
  e["model.u"] = format_double(model_u);
  e["model.v"] = format_double(model_v);
  e["model.diffusion"] = format_double(model_diffusion);
  e["model.periodic_lon"] = model_periodic_lon ? "true" : "false";
  e["model.dim"] = std::to_string(model_dim);
  e["model.scale"] = format_double(model_scale);

  e["surrogate.parameter_bias"] = format_double(surrogate_parameter_bias);
  e["surrogate.additive_bias"] = format_double(surrogate_additive_bias);
  e["surrogate.smoothing"] = surrogate_smoothing ? "true" : "false";

  e["truth.horizon"] = std::to_string(truth_horizon);
  e["truth.spinup"] = std::to_string(truth_spinup);
  e["truth.init_amplitude"] = format_double(truth_init_amplitude);

  e["obs.stride"] = std::to_string(obs_stride);
  e["obs.lat_offset"] = std::to_string(obs_lat_offset);
  e["obs.lon_offset"] = std::to_string(obs_lon_offset);
  e["obs.noise_variance"] = format_double(obs_noise_variance);

  e["kernel.size"] = std::to_string(kernel_size);
  e["kernel.sigma2"] = format_double(kernel_sigma2);
  e["covariance.q"] = format_double(covariance_q);
  e["covariance.sigma2"] = format_double(covariance_sigma2);

  e["filter.horizon"] = std::to_string(filter_horizon);
  e["filter.operational"] = filter_operational ? "true" : "false";
  e["filter.divergence_check"] = filter_divergence_check ? "true" : "false";

  e["io.cadence"] = std::to_string(io_cadence);
  e["io.truth_dir"] = io_truth_dir;
  e["io.obs_dir"] = io_obs_dir;
  e["io.analysis_dir"] = io_analysis_dir;
  e["io.operational_dir"] = io_operational_dir;

  e["forecast.horizon"] = std::to_string(forecast_horizon);
  e["forecast.start_stride"] = std::to_string(forecast_start_stride);
  e["forecast.smoothing"] = forecast_smoothing ? "true" : "false";
  e["forecast.ensemble_size"] = std::to_string(forecast_ensemble_size);
  e["forecast.perturbation_std"] = format_double(forecast_perturbation_std);
  e["forecast.control_member"] = forecast_control_member ? "true" : "false";
  e["forecast.track_feature"] = std::to_string(forecast_track_feature);
  e["forecast.track_start"] = std::to_string(forecast_track_start);
  e["forecast.track_lat_lo"] = std::to_string(forecast_track_lat_lo);
  e["forecast.track_lat_hi"] = std::to_string(forecast_track_lat_hi);
  e["forecast.track_lon_lo"] = std::to_string(forecast_track_lon_lo);
  e["forecast.track_lon_hi"] = std::to_string(forecast_track_lon_hi);

  e["theory.samples"] = std::to_string(theory_samples);
  e["theory.sample_stride"] = std::to_string(theory_sample_stride);
  e["theory.power_iterations"] = std::to_string(theory_power_iterations);
  e["theory.tail_fraction"] = format_double(theory_tail_fraction);
  e["theory.noise_draws"] = std::to_string(theory_noise_draws);

  e["metrics.estimate_dir"] = metrics_estimate_dir;
  e["metrics.acc_symmetric"] = metrics_acc_symmetric ? "true" : "false";
  return kv;
}

void ExperimentConfig::validate() const {
  if (model_kind != "lorenz96" && model_kind != "advection2d" &&
      model_kind != "linear") {
    throw ConfigError("model.kind must be lorenz96, advection2d, or linear");
  }
  if (grid_lat_scheme != "centers" && grid_lat_scheme != "spanned") {
    throw ConfigError("grid.lat_scheme must be centers or spanned");
  }
  if (obs_stride < 1) throw ConfigError("obs.stride must be >= 1");
  if (obs_lat_offset < 0 || obs_lat_offset >= obs_stride || obs_lon_offset < 0 ||
      obs_lon_offset >= obs_stride) {
    throw ConfigError("obs offsets must lie in [0, obs.stride)");
  }
  if (obs_noise_variance < 0.0) {
    throw ConfigError("obs.noise_variance must be nonnegative");
  }
  if (kernel_size < 0) throw ConfigError("kernel.size must be >= 0");
  if (kernel_sigma2 <= 0.0) throw ConfigError("kernel.sigma2 must be positive");
  if (covariance_q < 0.0) throw ConfigError("covariance.q must be >= 0");
  if (covariance_sigma2 < 0.0) throw ConfigError("covariance.sigma2 must be >= 0");
  if (truth_horizon < 0) throw ConfigError("truth.horizon must be >= 0");
  if (truth_spinup < 0) throw ConfigError("truth.spinup must be >= 0");
  if (io_cadence < 1) throw ConfigError("io.cadence must be >= 1");
  if (filter_horizon < 0) throw ConfigError("filter.horizon must be >= 0");
  if (forecast_horizon < 0) throw ConfigError("forecast.horizon must be >= 0");
  if (forecast_start_stride < 1) {
    throw ConfigError("forecast.start_stride must be >= 1");
  }
  if (forecast_ensemble_size < 1) {
    throw ConfigError("forecast.ensemble_size must be >= 1");
  }
  if (forecast_perturbation_std < 0.0) {
    throw ConfigError("forecast.perturbation_std must be nonnegative");
  }
  if (theory_samples < 1) throw ConfigError("theory.samples must be >= 1");
  if (!(theory_tail_fraction > 0.0 && theory_tail_fraction <= 1.0)) {
    throw ConfigError("theory.tail_fraction must lie in (0, 1]");
  }
  if (theory_noise_draws < 1) throw ConfigError("theory.noise_draws must be >= 1");
}

GridGeometry ExperimentConfig::build_geometry() const {
  if (model_kind == "lorenz96") return Lorenz96::geometry(model_n);
  if (model_kind == "linear") return DiagonalLinear::geometry(model_dim);
  if (grid_lat_scheme == "spanned") {
    return GridGeometry::spanned(grid_n_features, grid_n_lat, grid_n_lon,
                                 grid_lat_north, grid_lat_south);
  }
  return GridGeometry::regular(grid_n_features, grid_n_lat, grid_n_lon);
}

int ExperimentConfig::effective_kernel_size() const {
  return kernel_size > 0 ? kernel_size : obs_stride;
}

GaussianKernel ExperimentConfig::build_kernel() const {
  return GaussianKernel::gaussian(effective_kernel_size(), kernel_sigma2);
}

BackgroundCovariance ExperimentConfig::build_covariance() const {
  const double sigma2 = covariance_sigma2 > 0.0 ? covariance_sigma2 : kernel_sigma2;
  const GaussianKernel kernel =
      GaussianKernel::gaussian(effective_kernel_size(), sigma2);
  if (covariance_q > 0.0) return BackgroundCovariance{kernel, covariance_q};
  return BackgroundCovariance::with_default_q(kernel);
}

ThinningOperator ExperimentConfig::build_thinning(const GridGeometry& g) const {
  return ThinningOperator::make(g, obs_stride, obs_lat_offset, obs_lon_offset);
}

namespace {

std::shared_ptr<const Dynamics> make_base(const ExperimentConfig& c,
                                          double parameter_bias) {
  if (c.model_kind == "lorenz96") {
    Lorenz96Config mc{c.model_n, c.model_forcing + parameter_bias, c.model_dt,
                      c.model_substeps};
    return std::make_shared<Lorenz96>(mc);
  }
  if (c.model_kind == "advection2d") {
    Advection2DConfig mc{c.model_u + parameter_bias, c.model_v, c.model_diffusion,
                         c.model_periodic_lon, c.model_substeps};
    return std::make_shared<Advection2D>(mc);
  }
  DiagonalLinearConfig mc{c.model_dim, c.model_scale + parameter_bias};
  return std::make_shared<DiagonalLinear>(mc);
}

std::shared_ptr<const Dynamics> make_surrogate(const ExperimentConfig& c,
                                               bool smoothing) {
  auto base = make_base(c, c.surrogate_parameter_bias);
  std::optional<GridState> bias_field;
  if (c.surrogate_additive_bias != 0.0) {
    GridState field = GridState::zeros(c.build_geometry());
    for (double& v : field.values) v = c.surrogate_additive_bias;
    bias_field = std::move(field);
  }
  if (!bias_field && !smoothing && c.surrogate_parameter_bias == 0.0) {
    return base;  // a perfect surrogate IS the base model
  }
  // Smooth along longitude with the topology of the underlying model: the
  // cyclic models wrap, everything else clamps at the edge.
  const bool cyclic =
      c.model_kind == "lorenz96" ||
      (c.model_kind == "advection2d" && c.model_periodic_lon);
  return std::make_shared<SurrogateDynamics>(
      std::move(base), std::move(bias_field), smoothing,
      c.surrogate_parameter_bias,
      cyclic ? LonPadding::Periodic : LonPadding::Replicate);
}

}  // namespace

std::shared_ptr<const Dynamics> ExperimentConfig::build_true_dynamics() const {
  return make_base(*this, 0.0);
}

std::shared_ptr<const Dynamics> ExperimentConfig::build_surrogate_dynamics() const {
  return make_surrogate(*this, surrogate_smoothing);
}

std::shared_ptr<const Dynamics> ExperimentConfig::build_forecast_dynamics() const {
  return make_surrogate(*this, forecast_smoothing);
}

}  // namespace gasm
