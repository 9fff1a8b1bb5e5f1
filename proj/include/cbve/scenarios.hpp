// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "cbve/environment.hpp"

namespace cbve {

//! Names of the shipped environments.
std::vector<std::string> list_builtin_scenarios();

//! Environment for a shipped scenario on [0, horizon].
EnvironmentSpec builtin_scenario(const std::string& name, double horizon = 1.0);

}  // namespace cbve
