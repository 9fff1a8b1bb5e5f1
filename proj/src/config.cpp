// SPDX-License-Identifier: Apache-2.0
#include "cbve/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cbve/error.hpp"
#include "cbve/scenarios.hpp"

namespace cbve {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw InvalidArgument("expcli", "parse_config", where + ": " + what);
}

double number(const json& node, const char* key, const std::string& where,
              double fallback) {
  if (!node.contains(key)) return fallback;
  const auto& v = node.at(key);
  if (v.is_string() && (v == "inf" || v == "Infinity")) return kInf;
  if (!v.is_number()) bad(where + "/" + key, "expected a number");
  return v.get<double>();
}

double required(const json& node, const char* key, const std::string& where) {
  if (!node.contains(key)) bad(where, std::string("missing '") + key + "'");
  return number(node, key, where, 0.0);
}

std::vector<double> numbers(const json& node, const std::string& where) {
  if (!node.is_array()) bad(where, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : node) {
    if (!v.is_number()) bad(where, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void reject_unknown(const json& node, const std::vector<std::string>& keys,
                    const std::string& where) {
  if (!node.is_object()) bad(where, "expected an object");
  for (const auto& item : node.items()) {
    bool known = false;
    for (const auto& k : keys) known = known || item.key() == k;
    if (!known) bad(where, "unknown key '" + item.key() + "'");
  }
}

std::vector<KernelAtom> kernel_atoms(const json& node, const std::string& where) {
  std::vector<KernelAtom> atoms;
  if (!node.contains("atoms")) return atoms;
  const auto& list = node.at("atoms");
  if (!list.is_array()) bad(where + "/atoms", "expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::string at = where + "/atoms/" + std::to_string(i);
    reject_unknown(list[i], {"z", "w"}, at);
    atoms.push_back({required(list[i], "z", at), required(list[i], "w", at)});
  }
  return atoms;
}

PowerLaw power_law(const json& node, const std::string& where) {
  PowerLaw p;
  p.alpha = required(node, "alpha", where);
  p.scale = number(node, "scale", where, 1.0);
  p.zmin = number(node, "zmin", where, 0.0);
  p.zmax = number(node, "zmax", where, kInf);
  return p;
}

Coefficients coefficients(const json& node, const std::string& where) {
  Coefficients c;
  c.b1 = number(node, "b1", where, 0.0);
  c.c = number(node, "c", where, 0.0);
  if (node.contains("kernel")) c.kernel = parse_kernel(node.at("kernel"), where + "/kernel");
  return c;
}

EnvironmentSpec explicit_environment(const json& node, double horizon,
                                     const std::string& where) {
  reject_unknown(node, {"pieces", "atoms"}, where);
  std::vector<Piece> pieces;
  if (node.contains("pieces")) {
    const auto& list = node.at("pieces");
    if (!list.is_array()) bad(where + "/pieces", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      std::string at = where + "/pieces/" + std::to_string(i);
      reject_unknown(list[i], {"start", "end", "gamma_density", "b1", "c", "kernel"}, at);
      pieces.push_back({required(list[i], "start", at), required(list[i], "end", at),
                        required(list[i], "gamma_density", at),
                        coefficients(list[i], at)});
    }
  }
  std::vector<Atom> atoms;
  if (node.contains("atoms")) {
    const auto& list = node.at("atoms");
    if (!list.is_array()) bad(where + "/atoms", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      std::string at = where + "/atoms/" + std::to_string(i);
      reject_unknown(list[i], {"time", "mass", "b1", "c", "kernel"}, at);
      atoms.push_back({required(list[i], "time", at), required(list[i], "mass", at),
                       coefficients(list[i], at)});
    }
  }
  return EnvironmentSpec(horizon, std::move(pieces), std::move(atoms));
}

}  // namespace

JumpKernel parse_kernel(const json& node, const std::string& where) {
  if (!node.is_object() || !node.contains("type") || !node.at("type").is_string()) {
    bad(where, "kernel needs a string 'type'");
  }
  std::string type = node.at("type");
  if (type == "atomic") {
    reject_unknown(node, {"type", "atoms"}, where);
    return JumpKernel::atomic(kernel_atoms(node, where));
  }
  if (type == "powerlaw") {
    reject_unknown(node, {"type", "alpha", "scale", "zmin", "zmax"}, where);
    return JumpKernel::power_law(power_law(node, where));
  }
  if (type == "mixed") {
    reject_unknown(node, {"type", "atoms", "powerlaw"}, where);
    if (!node.contains("powerlaw")) return JumpKernel(kernel_atoms(node, where));
    const auto& pl = node.at("powerlaw");
    reject_unknown(pl, {"alpha", "scale", "zmin", "zmax"}, where + "/powerlaw");
    return JumpKernel(kernel_atoms(node, where), power_law(pl, where + "/powerlaw"));
  }
  bad(where + "/type", "unknown kernel type '" + type + "'");
}

json kernel_to_json(const JumpKernel& kernel) {
  json atoms = json::array();
  for (const auto& a : kernel.atoms()) atoms.push_back({{"z", a.z}, {"w", a.w}});
  json out{{"type", "mixed"}, {"atoms", atoms}};
  if (const auto& p = kernel.density()) {
    json pl{{"alpha", p->alpha}, {"scale", p->scale}, {"zmin", p->zmin}};
    pl["zmax"] = std::isinf(p->zmax) ? json("inf") : json(p->zmax);
    out["powerlaw"] = pl;
  }
  return out;
}

json environment_to_json(const EnvironmentSpec& env) {
  json pieces = json::array();
  for (const auto& p : env.pieces()) {
    pieces.push_back({{"start", p.start}, {"end", p.end}, {"gamma_density", p.density},
                      {"b1", p.coef.b1}, {"c", p.coef.c},
                      {"kernel", kernel_to_json(p.coef.kernel)}});
  }
  json atoms = json::array();
  for (const auto& a : env.atoms()) {
    atoms.push_back({{"time", a.time}, {"mass", a.mass}, {"b1", a.coef.b1},
                     {"c", a.coef.c}, {"kernel", kernel_to_json(a.coef.kernel)}});
  }
  return {{"pieces", pieces}, {"atoms", atoms}};
}

ExperimentConfig parse_config(const json& doc) {
  const std::string root = "config";
  reject_unknown(doc, {"name", "scenario", "environment", "horizon", "lambda",
                       "time_points", "k_list", "theta", "eta_t", "tol", "mc",
                       "output_dir"},
                 root);
  ExperimentConfig cfg;
  if (doc.contains("name")) cfg.name = doc.at("name").get<std::string>();
  cfg.horizon = number(doc, "horizon", root, 1.0);
  if (!(cfg.horizon > 0.0) || std::isinf(cfg.horizon)) bad(root + "/horizon", "need 0 < T < inf");

  bool has_scenario = doc.contains("scenario");
  bool has_env = doc.contains("environment");
  if (has_scenario == has_env) bad(root, "give exactly one of 'scenario' or 'environment'");
  if (has_scenario) {
    cfg.scenario = doc.at("scenario").get<std::string>();
    cfg.environment = builtin_scenario(cfg.scenario, cfg.horizon);
  } else {
    cfg.environment = explicit_environment(doc.at("environment"), cfg.horizon,
                                           root + "/environment");
  }
  if (cfg.name.empty()) cfg.name = has_scenario ? cfg.scenario : "custom";

  if (doc.contains("lambda")) {
    const auto& l = doc.at("lambda");
    std::string at = root + "/lambda";
    reject_unknown(l, {"min", "max", "points"}, at);
    cfg.lambda_min = number(l, "min", at, cfg.lambda_min);
    cfg.lambda_max = number(l, "max", at, cfg.lambda_max);
    cfg.lambda_points = static_cast<int>(number(l, "points", at, cfg.lambda_points));
  }
  if (!(cfg.lambda_min > 0.0 && cfg.lambda_min < cfg.lambda_max)) {
    bad(root + "/lambda", "need 0 < min < max");
  }
  if (cfg.lambda_points < 2) bad(root + "/lambda/points", "need at least 2");
  cfg.time_points = static_cast<int>(number(doc, "time_points", root, cfg.time_points));
  if (cfg.time_points < 2) bad(root + "/time_points", "need at least 2");

  if (doc.contains("k_list")) {
    cfg.k_list.clear();
    for (double k : numbers(doc.at("k_list"), root + "/k_list")) {
      if (k != std::floor(k) || k < 1) bad(root + "/k_list", "entries must be positive integers");
      cfg.k_list.push_back(static_cast<int>(k));
    }
  }
  if (cfg.k_list.empty()) bad(root + "/k_list", "must be nonempty");
  for (std::size_t i = 1; i < cfg.k_list.size(); ++i) {
    if (cfg.k_list[i] <= cfg.k_list[i - 1]) bad(root + "/k_list", "must be increasing");
  }

  cfg.theta = number(doc, "theta", root, cfg.theta);
  if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) bad(root + "/theta", "need 0 < theta < 1");
  cfg.eta = number(doc, "eta_t", root, cfg.eta);
  if (!(cfg.eta > 1.0)) bad(root + "/eta_t", "need eta_t > 1");
  cfg.tol = number(doc, "tol", root, cfg.tol);
  if (!(cfg.tol > 0.0)) bad(root + "/tol", "need tol > 0");

  if (doc.contains("mc")) {
    const auto& m = doc.at("mc");
    std::string at = root + "/mc";
    reject_unknown(m, {"enabled", "replicates", "x0", "seed", "times", "lambdas"}, at);
    if (m.contains("enabled")) cfg.mc.enabled = m.at("enabled").get<bool>();
    cfg.mc.replicates = static_cast<std::int64_t>(number(m, "replicates", at, 1e5));
    cfg.mc.x0 = number(m, "x0", at, cfg.mc.x0);
    if (m.contains("seed")) cfg.mc.seed = m.at("seed").get<std::uint64_t>();
    if (m.contains("times")) cfg.mc.times = numbers(m.at("times"), at + "/times");
    if (m.contains("lambdas")) cfg.mc.lambdas = numbers(m.at("lambdas"), at + "/lambdas");
    if (cfg.mc.replicates < 1) bad(at + "/replicates", "need at least 1");
    if (!(cfg.mc.x0 > 0.0)) bad(at + "/x0", "need x0 > 0");
  }
  if (cfg.mc.times.empty()) cfg.mc.times = {0.5 * cfg.horizon, cfg.horizon};
  if (cfg.mc.lambdas.empty()) cfg.mc.lambdas = {cfg.lambda_min, cfg.lambda_max};
  for (double t : cfg.mc.times) {
    if (!(t >= 0.0 && t <= cfg.horizon)) bad(root + "/mc/times", "times must lie in [0, T]");
  }
  for (double l : cfg.mc.lambdas) {
    if (!(l >= 0.0)) bad(root + "/mc/lambdas", "lambdas must be >= 0");
  }
  if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("expcli", "load_config", "cannot read '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw InvalidArgument("expcli", "load_config", path + ": " + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const json::exception& e) {
    throw InvalidArgument("expcli", "parse_config", path + ": " + e.what());
  }
}

}  // namespace cbve
