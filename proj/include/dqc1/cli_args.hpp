// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dqc1/cli.hpp"

namespace dqc1::cli {

/// Result of command-line parsing: either a config to run, or an exit status
/// (help text, usage error) that has already been reported.
struct ParsedArgs {
  std::optional<RunConfig> config;
  int exit_code = 0;
};

/// Parses argv. A --config file supplies defaults; flags given on the command
/// line override it.
inline ParsedArgs parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"DQC1 register simulator: trace estimation, open-system channel and thermodynamics."};
  app.set_version_flag("--version", "dqc1lab 1.0.0");

  std::string command;
  std::optional<std::string> config_path, family, unitary, alpha_grid, theta_grid, t_grid, output, format, basis,
      env, dilation, route, ancilla_freqs, alpha_single, theta_single;
  std::optional<int> n, samples, threads;
  std::optional<double> omega;
  std::optional<long long> shots;
  std::optional<std::uint64_t> seed;

  std::string commands;
  for (const auto& c : command_names()) commands += (commands.empty() ? "" : ", ") + c;
  app.add_option("command", command, "one of: " + commands)->required();
  app.add_option("--config", config_path, "JSON config file; command-line flags take precedence");
  app.add_option("--family", family, "target family: iswap, identity, haar, real-trace");
  app.add_option("--unitary", unitary, "iswap:<theta>, identity:<n>, haar:<n>:<seed>, or a Matrix JSON file");
  app.add_option("--alpha-grid", alpha_grid, "polarisations, start:end:count or a comma list");
  app.add_option("--alpha", alpha_single, "single polarisation");
  app.add_option("--theta-grid", theta_grid, "iswap angles, start:end:count; accepts pi, e.g. 0:2pi:64");
  app.add_option("--theta", theta_single, "single iswap angle");
  app.add_option("--t-grid", t_grid, "normalised traces for entropy-sweep (default -1:1:101)");
  app.add_option("--n", n, "number of ancillas");
  app.add_option("--omega", omega, "logical-qubit frequency");
  app.add_option("--ancilla-freqs", ancilla_freqs, "comma list of ancilla frequencies (default all 1)");
  app.add_option("--shots", shots, "measurement shots for sample");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--output,-o", output, "output file; '-' or absent writes to stdout");
  app.add_option("--format", format, "csv or json");
  app.add_option("--basis", basis, "Z (Re tr U) or Y (Im tr U)");
  app.add_option("--samples", samples, "samples for unitality-scan");
  app.add_option("--env", env, "unitality-scan environment: mixed, product:<p>, random");
  app.add_option("--dilation", dilation, "unitality-scan dilation: haar, separable, controlled");
  app.add_option("--route", route, "kraus: dilation|choi; choi: numeric|closed-form");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return {std::nullopt, app.exit(e, out, err)};
  }

  try {
    RunConfig cfg = config_path ? load_config_file(*config_path) : RunConfig{};
    cfg.command = command;
    const bool family_flag = family.has_value();
    if (family) cfg.family = *family;
    if (unitary) cfg.unitary = *unitary;
    if (family_flag && !unitary) cfg.unitary.clear();
    if (alpha_grid) cfg.alpha_grid = parse_grid(*alpha_grid);
    if (alpha_single) cfg.alpha_grid = {parse_scalar(*alpha_single)};
    if (theta_grid) cfg.theta_grid = parse_grid(*theta_grid);
    if (theta_single) cfg.theta_grid = {parse_scalar(*theta_single)};
    if (t_grid) cfg.t_grid = parse_grid(*t_grid);
    if (n) cfg.n = *n;
    if (omega) cfg.omega = *omega;
    if (ancilla_freqs) cfg.ancilla_freqs = parse_grid(*ancilla_freqs);
    if (shots) cfg.shots = *shots;
    if (seed) cfg.seed = *seed;
    if (output) cfg.output = *output;
    if (format) cfg.format = parse_format(*format);
    if (basis) cfg.basis = parse_basis(*basis);
    if (samples) cfg.samples = *samples;
    if (env) cfg.env = *env;
    if (dilation) cfg.dilation = *dilation;
    if (route) cfg.route = *route;
    if (threads) cfg.threads = *threads;
    if (cfg.command == "choi" && !route && cfg.route == "dilation") cfg.route = "numeric";
    return {std::move(cfg), 0};
  } catch (const std::exception& e) {
    write_error(err, e);
    return {std::nullopt, 2};
  }
}

}  // namespace dqc1::cli
