/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/// Command-line front end for the assimilation toolkit.
///
/// Every subcommand takes a key = value config file plus a run directory and
/// is a pure function of those two inputs: rerunning a command with the same
/// config, inputs, and seed reproduces its outputs byte for byte.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gasm/commands.hpp"
#include "gasm/config.hpp"
#include "gasm/errors.hpp"
#include "gasm/runs.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string run_dir;
  std::int64_t seed_override = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("-r,--run-dir", args.run_dir, "run directory")->required();
  cmd->add_option("--seed", args.seed_override,
                  "override the configured random seed");
}

gasm::ExperimentConfig load_config(const CommonArgs& args) {
  gasm::ExperimentConfig config =
      gasm::ExperimentConfig::from_kv(gasm::KeyValueConfig::parse_file(args.config_path));
  if (args.seed_override >= 0) {
    config.seed = static_cast<std::uint64_t>(args.seed_override);
  }
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gasm: grid assimilation and surrogate models"};
  app.require_subcommand(1);

  CommonArgs args;
  int (*selected)(const gasm::ExperimentConfig&, const gasm::RunPaths&) = nullptr;

  auto wire = [&](const std::string& name, const std::string& help,
                  int (*fn)(const gasm::ExperimentConfig&, const gasm::RunPaths&)) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, args);
    cmd->callback([&selected, fn]() { selected = fn; });
  };

  wire("truth", "integrate the true model and store its trajectory",
       gasm::cmd_truth);
  wire("observe", "sample noisy thinned observations from a truth run",
       gasm::cmd_observe);
  wire("assimilate", "run the filter over a stored observation sequence",
       gasm::cmd_assimilate);
  wire("forecast", "score forecasts from different initializations",
       gasm::cmd_forecast);
  wire("verify-theorem", "estimate filter stability constants and the error bound",
       gasm::cmd_verify_theorem);
  wire("metrics", "score a stored state sequence against the truth run",
       gasm::cmd_metrics);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const gasm::ExperimentConfig config = load_config(args);
    const gasm::RunPaths run{args.run_dir};
    return selected(config, run);
  } catch (const gasm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const gasm::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 1;
  } catch (const gasm::DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return 2;
  } catch (const gasm::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
