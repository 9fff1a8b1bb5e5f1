// SPDX-License-Identifier: Apache-2.0
#include "cbve/scenarios.hpp"

#include "cbve/error.hpp"

namespace cbve {

std::vector<std::string> list_builtin_scenarios() {
  return {"feller", "linear-drift", "atom-bottleneck", "heavy-tail", "null"};
}

EnvironmentSpec builtin_scenario(const std::string& name, double horizon) {
  if (name == "feller") {
    Coefficients c;
    c.c = 1.0;
    return EnvironmentSpec(horizon, {{0.0, horizon, 1.0, c}}, {});
  }
  if (name == "linear-drift") {
    Coefficients c;
    c.b1 = 1.0;
    return EnvironmentSpec(horizon, {{0.0, horizon, 1.0, c}}, {});
  }
  if (name == "atom-bottleneck") {
    Coefficients flow;
    flow.c = 1.0;
    Coefficients jump;
    jump.b1 = 0.5;
    return EnvironmentSpec(horizon, {{0.0, horizon, 1.0, flow}},
                           {{0.5 * horizon, 1.0, jump}});
  }
  if (name == "heavy-tail") {
    PowerLaw small{0.5, 0.5, 0.0, 1.0};
    Coefficients flow;
    flow.b1 = 0.3;
    flow.kernel = JumpKernel({{2.0, 0.3}}, small);
    Coefficients jump;
    jump.b1 = 0.4;
    jump.kernel = JumpKernel({{3.0, 0.4}}, small);
    return EnvironmentSpec(horizon, {{0.0, horizon, 1.0, flow}},
                           {{0.5 * horizon, 0.5, jump}});
  }
  if (name == "null") {
    return EnvironmentSpec(horizon, {{0.0, horizon, 1.0, {}}}, {});
  }
  throw InvalidArgument("expcli", "builtin_scenario", "unknown scenario '" + name + "'");
}

}  // namespace cbve
