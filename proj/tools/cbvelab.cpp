// SPDX-License-Identifier: Apache-2.0
// Command-line front end: run, validate, scenarios.
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "cbve/experiment.hpp"
#include "cbve/scenarios.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cbvelab: cumulant and rescaled branching-chain experiments"};
  app.require_subcommand(1);

  std::string config_path;
  cbve::RunOverrides overrides;
  std::string out_dir;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::int64_t replicates = 0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run the sweep described by a config file");
  run->add_option("config", config_path, "Experiment config (JSON, comments allowed)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* out_opt = run->add_option("--out", out_dir,
                                  "Output directory (overrides CBVELAB_OUT and the config)");
  auto* seed_opt = run->add_option("--seed", seed, "Monte Carlo seed");
  auto* tol_opt = run->add_option("--tol", tol, "Cumulant solver tolerance")
                      ->check(CLI::PositiveNumber);
  auto* reps_opt = run->add_option("--replicates", replicates, "Monte Carlo replicates")
                       ->check(CLI::PositiveNumber);
  run->add_option("--threads", overrides.threads, "Worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("-q,--quiet", quiet, "No progress output");

  auto* validate = app.add_subcommand("validate", "Parse a config and check admissibility");
  validate->add_option("config", config_path, "Experiment config")
      ->required()
      ->check(CLI::ExistingFile);

  app.add_subcommand("scenarios", "List builtin scenarios");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("scenarios")) {
    for (const auto& name : cbve::list_builtin_scenarios()) std::cout << name << "\n";
    return cbve::kExitOk;
  }

  if (app.got_subcommand("validate")) {
    auto result = cbve::validate_config(config_path);
    (result.exit_code == cbve::kExitOk ? std::cout : std::cerr) << result.message << "\n";
    return result.exit_code;
  }

  if (*out_opt) {
    overrides.output_dir = out_dir;
  } else if (const char* env = std::getenv("CBVELAB_OUT"); env && *env) {
    overrides.output_dir = env;
  }
  if (*seed_opt) overrides.seed = seed;
  if (*tol_opt) overrides.tol = tol;
  if (*reps_opt) overrides.replicates = replicates;

  auto result = cbve::run_experiment(config_path, overrides, quiet ? nullptr : &std::cerr);
  if (result.exit_code != cbve::kExitOk) {
    std::cerr << "error: " << result.message << "\n";
  } else if (!quiet) {
    std::cerr << "wrote " << result.output_dir << "/{report.json,errors.csv,mc.csv}\n";
  }
  return result.exit_code;
}
