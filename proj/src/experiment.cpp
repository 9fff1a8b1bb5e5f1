// SPDX-License-Identifier: Apache-2.0
#include "cbve/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "cbve/cumulant.hpp"
#include "cbve/discrete.hpp"
#include "cbve/error.hpp"

namespace cbve {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

json provenance(const char* module, const char* operation, json inputs) {
  return {{"module", module}, {"operation", operation}, {"inputs", std::move(inputs)}};
}

json config_to_json(const ExperimentConfig& cfg) {
  return {{"name", cfg.name},
          {"scenario", cfg.scenario},
          {"horizon", cfg.horizon},
          {"lambda", {{"min", cfg.lambda_min}, {"max", cfg.lambda_max},
                      {"points", cfg.lambda_points}}},
          {"time_points", cfg.time_points},
          {"k_list", cfg.k_list},
          {"theta", cfg.theta},
          {"eta_t", cfg.eta},
          {"tol", cfg.tol},
          {"mc", {{"enabled", cfg.mc.enabled}, {"replicates", cfg.mc.replicates},
                  {"x0", cfg.mc.x0}, {"seed", cfg.mc.seed},
                  {"times", cfg.mc.times}, {"lambdas", cfg.mc.lambdas}}},
          {"output_dir", cfg.output_dir}};
}

json validation_to_json(const ValidationReport& v) {
  json list = json::array();
  for (const auto& x : v.violations) {
    list.push_back({{"condition", x.condition}, {"location", x.location}, {"detail", x.detail}});
  }
  return {{"ok", v.ok()}, {"violations", list}};
}

json envelope_to_json(const ConvergenceReport& r) {
  const auto& e = r.envelope;
  json out{{"applicable", r.envelope_ok}};
  if (!r.envelope_ok) {
    out["error"] = r.envelope_error;
    return out;
  }
  out.update({{"upper", e.upper}, {"lower", e.lower}, {"c0", e.c0}, {"f", e.f},
              {"h", e.h}, {"epsilon", e.epsilon}, {"total_variation", e.total_variation},
              {"atom_product", e.atom_product},
              {"source", provenance("cumulant", "envelope_bounds",
                                    {{"horizon", e.horizon}, {"a", e.a}, {"b", e.b},
                                     {"eta_t", e.eta}})}});
  return out;
}

json events_to_json(int k, const std::vector<BuildEvent>& events) {
  json list = json::array();
  for (const auto& e : events) {
    list.push_back({{"k", k}, {"generation", e.generation}, {"time", e.time},
                    {"reason", e.reason}});
  }
  return list;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("expcli", "run_experiment", "cannot write '" + path.string() + "'");
  out << text;
}

void write_report(RunResult& result) {
  std::filesystem::create_directories(result.output_dir);
  write_text(std::filesystem::path(result.output_dir) / "report.json",
             result.report.dump(2) + "\n");
}

RunResult failure(int code, const std::string& message, json report,
                  const std::string& output_dir) {
  RunResult r;
  r.exit_code = code;
  r.message = message;
  r.output_dir = output_dir;
  r.report = std::move(report);
  r.report["status"] = code == kExitInvalid ? "invalid" : "solver_failure";
  r.report["error"] = message;
  return r;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

ParallelFor make_parallel_for(int threads) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (threads == 1) return {};
  return [threads](std::size_t n, const std::function<void(std::size_t)>& body) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    };
    std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < count; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  };
}

RunResult run_experiment(ExperimentConfig cfg, const RunOverrides& overrides,
                         std::ostream* log) {
  auto started = Clock::now();
  if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
  if (overrides.seed) cfg.mc.seed = *overrides.seed;
  if (overrides.tol) cfg.tol = *overrides.tol;
  if (overrides.replicates) cfg.mc.replicates = *overrides.replicates;

  json report{{"tool", "cbvelab"}, {"generated", timestamp()},
              {"config", config_to_json(cfg)},
              {"environment", environment_to_json(cfg.environment)}};
  auto note = [&](const std::string& s) {
    if (log) *log << s << std::endl;
  };

  auto validation = validate_admissible(cfg.environment, cfg.eta);
  report["validation"] = validation_to_json(validation);
  if (!validation.ok()) {
    std::string msg = "environment::validate_admissible: condition " +
                      validation.violations.front().condition + " violated at " +
                      validation.violations.front().location + " (" +
                      validation.violations.front().detail + ")";
    auto r = failure(kExitInvalid, msg, std::move(report), cfg.output_dir);
    write_report(r);
    return r;
  }
  for (int k : cfg.k_list) {
    double kx = k * cfg.mc.x0;
    if (cfg.mc.enabled && std::abs(kx - std::round(kx)) > 1e-9) {
      auto r = failure(kExitInvalid,
                       "expcli::run_experiment: k x0 must be an integer for every k",
                       std::move(report), cfg.output_dir);
      write_report(r);
      return r;
    }
  }

  auto parallel = make_parallel_for(overrides.threads);
  auto run_all = [&](std::size_t n, const std::function<void(std::size_t)>& body) {
    if (parallel) {
      parallel(n, body);
    } else {
      for (std::size_t i = 0; i < n; ++i) body(i);
    }
  };

  json timings = json::object();
  try {
    ConvergenceOptions opt;
    opt.horizon = cfg.horizon;
    opt.a = cfg.lambda_min;
    opt.b = cfg.lambda_max;
    opt.lambda_points = cfg.lambda_points;
    opt.time_points = cfg.time_points;
    opt.theta = cfg.theta;
    opt.eta = cfg.eta;
    opt.tol = cfg.tol;

    auto t0 = Clock::now();
    ConvergenceReport frame = convergence_frame(cfg.environment, opt);
    auto exact = exact_grid(cfg.environment, frame);
    timings["exact_grid"] = seconds_since(t0);
    note("exact grid: " + format_double(seconds_since(t0)) + " s");

    std::size_t nk = cfg.k_list.size();
    std::vector<DiscreteModel> models(nk);
    std::vector<ConvergenceRow> rows(nk);
    std::vector<double> row_time(nk);
    t0 = Clock::now();
    run_all(nk, [&](std::size_t i) {
      auto s = Clock::now();
      models[i] = build_discrete_model(cfg.environment, cfg.k_list[i], cfg.theta);
      rows[i] = convergence_row(cfg.environment, models[i], frame, exact);
      row_time[i] = seconds_since(s);
    });
    timings["convergence"] = seconds_since(t0);

    json conv = json::array();
    json downgrades = json::array();
    json notes = json::array();
    for (std::size_t i = 0; i < nk; ++i) {
      const auto& r = rows[i];
      conv.push_back({{"k", r.k}, {"beta", r.beta}, {"generations", r.generations},
                      {"sup_error", r.sup_error}, {"sup_d_error", r.sup_d_error},
                      {"corridor_violations", r.corridor_violations},
                      {"corridor_checked", r.corridor_checked},
                      {"min_vk", r.min_vk}, {"max_vk", r.max_vk},
                      {"residual_sum", r.residual_sum}, {"residual_bound", r.residual_bound},
                      {"downgrades", r.downgrades}, {"seconds", row_time[i]},
                      {"source", provenance("discrete", "convergence_row",
                                            {{"k", r.k}, {"theta", cfg.theta},
                                             {"lambdas", frame.lambdas},
                                             {"times", frame.times}, {"tol", cfg.tol}})}});
      for (auto& e : events_to_json(r.k, models[i].downgrades())) downgrades.push_back(e);
      for (auto& e : events_to_json(r.k, models[i].notes())) notes.push_back(e);
      note("k=" + std::to_string(r.k) + " sup_error=" + format_double(r.sup_error) +
           " corridor_violations=" + std::to_string(r.corridor_violations));
    }
    report["envelope"] = envelope_to_json(frame);
    report["convergence"] = conv;
    report["downgrades"] = downgrades;
    report["builder_notes"] = notes;

    json mc = json::array();
    std::vector<McReport> mc_reports;
    if (cfg.mc.enabled) {
      t0 = Clock::now();
      for (std::size_t i = 0; i < nk; ++i) {
        McOptions mo;
        mo.x0 = cfg.mc.x0;
        mo.times = cfg.mc.times;
        mo.lambdas = cfg.mc.lambdas;
        mo.replicates = cfg.mc.replicates;
        mo.seed = cfg.mc.seed;
        mo.env = &cfg.environment;
        mo.tol = cfg.tol;
        auto s = Clock::now();
        mc_reports.push_back(mc_laplace_check(models[i], mo, parallel));
        const auto& m = mc_reports.back();
        json cells = json::array();
        for (const auto& c : m.cells) {
          cells.push_back({{"t", c.t}, {"lambda", c.lambda}, {"estimate", c.estimate},
                           {"stderr", c.stderr_}, {"exact_vk", c.exact_vk},
                           {"target", c.target}, {"z", c.z}, {"limit_v", c.limit_v},
                           {"limit_gap", c.limit_gap}});
        }
        mc.push_back({{"k", m.k}, {"x0", m.x0}, {"replicates", m.replicates},
                      {"seed", m.seed}, {"exploded", m.exploded}, {"cells", cells},
                      {"seconds", seconds_since(s)},
                      {"source", provenance("simulate", "mc_laplace_check",
                                            {{"k", m.k}, {"x0", m.x0},
                                             {"replicates", m.replicates},
                                             {"seed", m.seed}})}});
        note("mc k=" + std::to_string(m.k) + ": " + format_double(seconds_since(s)) + " s");
      }
      timings["mc"] = seconds_since(t0);
    }
    report["mc"] = mc;

    std::filesystem::create_directories(cfg.output_dir);
    std::string header = "# generated " + report["generated"].get<std::string>() +
                         " by cbvelab for " + cfg.name + "\n";
    std::string errors = header + "k,sup_error,corridor_violations,residual_sum\n";
    for (const auto& r : rows) {
      errors += std::to_string(r.k) + "," + format_double(r.sup_error) + "," +
                std::to_string(r.corridor_violations) + "," + format_double(r.residual_sum) + "\n";
    }
    write_text(std::filesystem::path(cfg.output_dir) / "errors.csv", errors);
    std::string mc_csv = header + "k,t,lambda,estimate,stderr,exact_vk,z,limit_v\n";
    for (const auto& m : mc_reports) {
      for (const auto& c : m.cells) {
        mc_csv += std::to_string(m.k) + "," + format_double(c.t) + "," +
                  format_double(c.lambda) + "," + format_double(c.estimate) + "," +
                  format_double(c.stderr_) + "," + format_double(c.exact_vk) + "," +
                  format_double(c.z) + "," + format_double(c.limit_v) + "\n";
      }
    }
    write_text(std::filesystem::path(cfg.output_dir) / "mc.csv", mc_csv);
  } catch (const InvalidArgument& e) {
    auto r = failure(kExitInvalid, e.what(), std::move(report), cfg.output_dir);
    write_report(r);
    return r;
  } catch (const std::exception& e) {
    auto r = failure(kExitSolver, e.what(), std::move(report), cfg.output_dir);
    write_report(r);
    return r;
  }

  timings["total"] = seconds_since(started);
  report["timings"] = timings;
  report["status"] = "ok";
  RunResult result;
  result.exit_code = kExitOk;
  result.output_dir = cfg.output_dir;
  result.message = "ok";
  result.report = std::move(report);
  write_report(result);
  return result;
}

RunResult run_experiment(const std::string& config_path,
                         const RunOverrides& overrides, std::ostream* log) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const Error& e) {
    std::string dir = overrides.output_dir.value_or(cfg.output_dir);
    auto r = failure(kExitInvalid, e.what(),
                     {{"tool", "cbvelab"}, {"generated", timestamp()}, {"config_path", config_path}},
                     dir);
    write_report(r);
    return r;
  }
  return run_experiment(std::move(cfg), overrides, log);
}

RunResult validate_config(const std::string& config_path) {
  RunResult r;
  try {
    auto cfg = load_config(config_path);
    auto v = validate_admissible(cfg.environment, cfg.eta);
    r.report = {{"config", config_to_json(cfg)}, {"validation", validation_to_json(v)}};
    if (!v.ok()) {
      r.exit_code = kExitInvalid;
      const auto& x = v.violations.front();
      r.message = "environment::validate_admissible: condition " + x.condition +
                  " violated at " + x.location + " (" + x.detail + ")";
    } else {
      r.message = "ok";
    }
  } catch (const Error& e) {
    r.exit_code = kExitInvalid;
    r.message = e.what();
  }
  return r;
}

}  // namespace cbve
