// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "cbve/environment.hpp"

namespace cbve {

struct McSettings {
  bool enabled = true;
  std::int64_t replicates = 100'000;
  double x0 = 1.0;
  std::uint64_t seed = 1;
  std::vector<double> times;    //!< empty: {T/2, T}
  std::vector<double> lambdas;  //!< empty: {a, b}
};

/*!
 * \brief Parsed experiment file.
 *
 * The environment comes either from a named builtin scenario or from an
 * explicit piece/atom list. Times in the list are absolute.
 */
struct ExperimentConfig {
  std::string name;
  std::string scenario;  //!< builtin name, empty if explicit
  EnvironmentSpec environment;
  double horizon = 1.0;
  double lambda_min = 0.5;
  double lambda_max = 2.0;
  int lambda_points = 7;
  int time_points = 11;
  std::vector<int> k_list{50, 200, 800};
  double theta = 0.5;
  double eta = 2.0;
  double tol = 1e-10;
  McSettings mc;
  std::string output_dir = "out";
};

//! Raised for any schema problem; carries a JSON-pointer-like path.
ExperimentConfig parse_config(const nlohmann::json& doc);

//! Reads the file (comments allowed) and parses it.
ExperimentConfig load_config(const std::string& path);

JumpKernel parse_kernel(const nlohmann::json& node, const std::string& where);
nlohmann::json kernel_to_json(const JumpKernel& kernel);
nlohmann::json environment_to_json(const EnvironmentSpec& env);

}  // namespace cbve
