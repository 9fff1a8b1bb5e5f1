// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"

#include "cbve/config.hpp"
#include "cbve/simulate.hpp"

namespace cbve {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitSolver = 3 };

//! Command-line overrides applied on top of the config file.
struct RunOverrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::int64_t> replicates;
  int threads = 0;  //!< 0: hardware concurrency
};

struct RunResult {
  int exit_code = kExitOk;
  std::string output_dir;
  std::string message;
  nlohmann::json report;
};

//! ParallelFor over a bounded pool of worker threads; threads <= 1 runs inline.
ParallelFor make_parallel_for(int threads);

//! Full sweep for a parsed config; writes report.json, errors.csv, mc.csv.
RunResult run_experiment(ExperimentConfig config, const RunOverrides& overrides,
                         std::ostream* log = nullptr);

//! Loads, validates and runs; parse and admissibility failures give exit 2.
RunResult run_experiment(const std::string& config_path,
                         const RunOverrides& overrides,
                         std::ostream* log = nullptr);

//! Parses and checks admissibility without running.
RunResult validate_config(const std::string& config_path);

//! 17 significant digits, locale independent.
std::string format_double(double x);

}  // namespace cbve
