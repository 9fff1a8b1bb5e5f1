// SPDX-License-Identifier: Apache-2.0
#include "cbve/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbve/error.hpp"
#include "cbve/mechanism.hpp"

namespace cbve {
namespace {

constexpr double kCoefficientFloor = -1e-14;

const Pgf& identity_pgf() {
  static const Pgf id;
  return id;
}

Pgf cell_pgf(const std::vector<Segment>& segs, int k, double ck, double q) {
  double b = 0.0;
  double e2 = q;
  std::vector<PoissonTerm> poisson;
  std::vector<PowerLawTerm> power_law;
  for (const auto& seg : segs) {
    const auto& coef = *seg.coef;
    b += seg.mass * drift_k(coef, ck);
    e2 += seg.mass * coef.c * k;
    for (const auto& a : coef.kernel.atoms()) {
      if (a.z <= ck && a.w > 0.0) {
        poisson.push_back({seg.mass * a.w / k, k * a.z, true});
      }
    }
    if (const auto& d = coef.kernel.density()) {
      if (auto r = d->restricted(0.0, ck)) {
        power_law.push_back({seg.mass / k, *r, static_cast<double>(k), true});
      }
    }
  }
  return Pgf(b, e2, std::move(poisson), std::move(power_law));
}

Pgf atom_pgf(const Atom& atom, int k, double theta) {
  double cut = std::pow(static_cast<double>(k), -theta);
  const auto& coef = atom.coef;
  double delta = (coef.b1 + coef.kernel.moment(1.0, cut, 1.0)) * atom.mass;
  double a = 1.0 - delta;
  std::vector<PoissonTerm> poisson;
  std::vector<PowerLawTerm> power_law;
  if (a > 0.0) poisson.push_back({1.0, a, true});
  for (const auto& x : coef.kernel.atoms()) {
    if (x.z > cut && x.w > 0.0) {
      poisson.push_back({atom.mass * x.w / k, k * x.z, false});
    }
  }
  if (const auto& d = coef.kernel.density()) {
    if (auto r = d->restricted(cut, kInf)) {
      power_law.push_back({atom.mass / k, *r, static_cast<double>(k), false});
    }
  }
  // With a <= 0 the exponential factor is 1 and e1 = 1 keeps g(1) = 1.
  return Pgf(a > 0.0 ? delta : 1.0, 0.0, std::move(poisson), std::move(power_law));
}

std::string invalid_reason(const Pgf& g) {
  double p0 = g.at_zero();
  double p1 = g.slope_at_zero();
  if (p0 >= kCoefficientFloor && p1 >= kCoefficientFloor && g.e2() >= 0.0) {
    return {};
  }
  std::ostringstream os;
  os.precision(17);
  os << "negative coefficient: p0 = " << p0 << ", p1 = " << p1
     << ", quadratic = " << g.e2();
  return os.str();
}

void check_lambda(const DiscreteModel& model, double lambda, const char* op) {
  if (!(lambda > 0.0) || lambda > model.level()) {
    throw InvalidArgument("discrete", op, "need 0 < lambda <= k");
  }
}

double cumulant_from_deficit(int k, double x, const char* op) {
  if (!(x < 1.0) || !(x >= 0.0)) {
    std::ostringstream os;
    os << "composed pgf value " << 1.0 - x << " outside (0, 1]";
    throw CorruptPgf("discrete", op, os.str());
  }
  return -k * std::log1p(-x);
}

}  // namespace

Pgf auxiliary_quadratic_pgf(double q, double drift) {
  double p0 = 2.0 * (q + drift);
  double p2 = 2.0 * q;
  return Pgf::quadratic(p0, 1.0 - p0 - p2, p2);
}

const char* to_string(GenerationKind kind) {
  switch (kind) {
    case GenerationKind::Identity: return "identity";
    case GenerationKind::Cell: return "cell";
    case GenerationKind::Atom: return "atom";
  }
  return "?";
}

//---------------------------------------------------------------------------//
DiscreteModel DiscreteModel::from_chain(int k, std::vector<Pgf> pgfs) {
  DiscreteModel m;
  m.k_ = k;
  m.count_ = static_cast<std::int64_t>(pgfs.size());
  m.slot_.assign(pgfs.size(), -1);
  for (std::size_t i = 0; i < pgfs.size(); ++i) {
    if (pgfs[i].is_identity()) continue;
    m.slot_[i] = static_cast<std::int32_t>(m.active_.size());
    m.active_.push_back({static_cast<std::int64_t>(i), GenerationKind::Cell,
                         0.0, 0.0, std::move(pgfs[i])});
  }
  return m;
}

const Pgf& DiscreteModel::pgf(std::int64_t i) const {
  if (i < 0 || i >= count_ || slot_[static_cast<std::size_t>(i)] < 0) {
    return identity_pgf();
  }
  return active_[static_cast<std::size_t>(slot_[static_cast<std::size_t>(i)])].pgf;
}

GenerationKind DiscreteModel::kind(std::int64_t i) const {
  if (i < 0 || i >= count_ || slot_[static_cast<std::size_t>(i)] < 0) {
    return GenerationKind::Identity;
  }
  return active_[static_cast<std::size_t>(slot_[static_cast<std::size_t>(i)])].kind;
}

std::pair<std::size_t, std::size_t> DiscreteModel::active_range(
    std::int64_t m, std::int64_t n) const {
  auto by_index = [](const Generation& g, std::int64_t i) { return g.index < i; };
  auto lo = std::lower_bound(active_.begin(), active_.end(), m, by_index);
  auto hi = std::lower_bound(lo, active_.end(), n, by_index);
  return {static_cast<std::size_t>(lo - active_.begin()),
          static_cast<std::size_t>(hi - active_.begin())};
}

double DiscreteModel::compose_deficit(std::int64_t m, std::int64_t n,
                                      double x) const {
  if (m > n) throw InvalidArgument("discrete", "pgf_compose_eval", "need m <= n");
  auto [lo, hi] = active_range(m, n);
  for (std::size_t j = hi; j-- > lo;) x = active_[j].pgf.deficit(x);
  return x;
}

double DiscreteModel::compose_excess(std::int64_t m, std::int64_t n,
                                     double x) const {
  auto [lo, hi] = active_range(m, n);
  if (lo == hi) return 0.0;
  if (hi - lo == 1) return active_[lo].pgf.excess(x);
  return x - compose_deficit(m, n, x);
}

double DiscreteModel::compose(std::int64_t m, std::int64_t n, double u) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw InvalidArgument("discrete", "pgf_compose_eval", "u outside [0, 1]");
  }
  return 1.0 - compose_deficit(m, n, 1.0 - u);
}

//---------------------------------------------------------------------------//
DiscreteModel build_discrete_model(const EnvironmentSpec& env, int k,
                                   double theta) {
  if (k < 1) throw InvalidArgument("discrete", "build_discrete_model", "k must be >= 1");
  if (!(theta > 0.0 && theta < 1.0)) {
    throw InvalidArgument("discrete", "build_discrete_model", "theta must be in (0, 1)");
  }
  DiscreteModel model;
  model.k_ = k;
  model.theta_ = theta;
  model.c0_ = compute_c0(env);
  if (model.c0_ == 0.0) {
    model.clock_ = DiscreteTimeScale(env, 0.0);
    return model;
  }
  model.clock_ = discretize_time(env, k, model.c0_);
  const auto& clock = model.clock_;
  model.count_ = clock.total();
  model.slot_.assign(static_cast<std::size_t>(model.count_), -1);

  double ck = truncation_cutoff(k, model.c0_);
  if (ck < 1.0 || ck > k) {
    std::ostringstream os;
    os << "c_k = " << ck << " clamped to [1, k]";
    ck = std::clamp(ck, 1.0, static_cast<double>(k));
    model.notes_.push_back({-1, 0.0, os.str()});
  }
  model.ck_ = ck;
  double q = std::cbrt(static_cast<double>(k)) / clock.beta();

  for (std::int64_t i = 1; i <= model.count_; ++i) {
    Generation gen;
    gen.index = i - 1;
    if (clock.in_s(i)) {
      gen.kind = GenerationKind::Cell;
      gen.start = clock.inverse(i - 1);
      gen.end = clock.inverse(i);
      gen.pgf = cell_pgf(env.segments(gen.start, gen.end, Interval::Open), k, ck, q);
    } else if (i >= 2 && clock.in_s(i - 1)) {
      double s = clock.inverse(i - 1);
      const Atom* atom = env.atom_at(s);
      if (!atom) {
        throw Error("discrete", "build_discrete_model",
                    "clock jump without a gamma-atom");
      }
      gen.kind = GenerationKind::Atom;
      gen.start = gen.end = s;
      gen.pgf = atom_pgf(*atom, k, theta);
    } else {
      continue;
    }
    if (auto reason = invalid_reason(gen.pgf); !reason.empty()) {
      model.downgrades_.push_back({gen.index, gen.end, reason});
      continue;
    }
    model.slot_[static_cast<std::size_t>(gen.index)] =
        static_cast<std::int32_t>(model.active_.size());
    model.active_.push_back(std::move(gen));
  }
  return model;
}

double chain_cumulant(const DiscreteModel& model, std::int64_t m, std::int64_t n,
                      double lambda) {
  int k = model.level();
  // An all-identity stretch returns lambda exactly, without the log round trip.
  auto [lo, hi] = model.active_range(m, n);
  if (lo == hi && m <= n) return lambda;
  double x = model.compose_deficit(m, n, -std::expm1(-lambda / k));
  return cumulant_from_deficit(k, x, "discrete_cumulant");
}

double discrete_cumulant(const DiscreteModel& model, double r, double t,
                         double lambda) {
  if (!(r >= 0.0) || r > t) {
    throw InvalidArgument("discrete", "discrete_cumulant", "need 0 <= r <= t");
  }
  if (!(lambda > 0.0)) {
    throw InvalidArgument("discrete", "discrete_cumulant", "lambda must be > 0");
  }
  const auto& clock = model.clock();
  return chain_cumulant(model, clock(r), clock(t), lambda);
}

std::vector<double> discrete_cumulant_path(const DiscreteModel& model, double t,
                                           double lambda,
                                           const std::vector<double>& rs) {
  const auto& clock = model.clock();
  int k = model.level();
  std::vector<std::size_t> order(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return rs[a] > rs[b]; });
  std::vector<double> out(rs.size());
  double x = -std::expm1(-lambda / k);
  std::int64_t at = clock(t);
  for (std::size_t idx : order) {
    if (rs[idx] > t) {
      throw InvalidArgument("discrete", "discrete_cumulant", "need r <= t");
    }
    std::int64_t m = clock(rs[idx]);
    x = model.compose_deficit(m, at, x);
    at = m;
    auto [lo, hi] = model.active_range(m, clock(t));
    out[idx] = lo == hi ? lambda : cumulant_from_deficit(k, x, "discrete_cumulant");
  }
  return out;
}

//---------------------------------------------------------------------------//
double big_phi(const DiscreteModel& model, double s, double lambda, int which) {
  check_lambda(model, lambda, "big_phi");
  const auto& clock = model.clock();
  int k = model.level();
  std::int64_t j = clock.left_limit(s);
  if (which == 1) return k * model.compose_excess(j, j + 1, lambda / k);
  if (which == 2) return k * model.compose_excess(j + 1, clock(s), lambda / k);
  throw InvalidArgument("discrete", "big_phi", "which must be 1 or 2");
}

double small_phi(const DiscreteModel& model, double s, double lambda, int which,
                 PhiRoute route) {
  check_lambda(model, lambda, "small_phi");
  int k = model.level();
  double x0 = -std::expm1(-lambda / k);
  if (route == PhiRoute::Relation) {
    double big = big_phi(model, s, k * x0, which);
    return k * std::log1p(std::exp(lambda / k) * big / k);
  }
  const auto& clock = model.clock();
  std::int64_t j = clock.left_limit(s);
  std::int64_t m = which == 1 ? j : j + 1;
  std::int64_t n = which == 1 ? j + 1 : clock(s);
  if (which != 1 && which != 2) {
    throw InvalidArgument("discrete", "small_phi", "which must be 1 or 2");
  }
  return lambda + k * std::log1p(-model.compose_deficit(m, n, x0));
}

double h_k(int k, double z) { return -k * std::expm1(-z / k); }

//---------------------------------------------------------------------------//
ResidualTable condition_a_residuals(const DiscreteModel& model,
                                    const EnvironmentSpec& env, double r,
                                    double t, const std::vector<double>& lambdas) {
  ResidualTable table;
  const auto& clock = model.clock();
  for (double s : clock.jump_times(r, t)) {
    std::int64_t j = clock.left_limit(s);
    auto cell = env.segments(clock.inverse(j), s, Interval::Open);
    const Atom* atom = env.atom_at(s);
    ResidualRow row;
    row.s = s;
    for (double lambda : lambdas) {
      double integral = 0.0;
      for (const auto& seg : cell) integral += phi(*seg.coef, lambda) * seg.mass;
      double i1 = big_phi(model, s, lambda, 1) - integral;
      double at = atom ? phi(atom->coef, lambda) * atom->mass : 0.0;
      double i2 = big_phi(model, s, lambda, 2) - at;
      row.sup_i1 = std::max(row.sup_i1, std::abs(i1));
      row.sup_i2 = std::max(row.sup_i2, std::abs(i2));
      row.sup_total = std::max(row.sup_total, std::abs(i1) + std::abs(i2));
    }
    table.sum_i1 += row.sup_i1;
    table.sum_i2 += row.sup_i2;
    table.sum_total += row.sup_total;
    table.rows.push_back(row);
  }
  return table;
}

ResidualBound condition_a_bound(const DiscreteModel& model,
                                const EnvironmentSpec& env, double t, double cap) {
  ResidualBound bound;
  const auto& clock = model.clock();
  int k = model.level();
  double beta = clock.beta();
  if (beta == 0.0) return bound;
  double ck = model.cutoff();
  double cut = std::pow(static_cast<double>(k), -model.theta());
  double m2 = cap * cap;
  std::int64_t n = clock(t);

  for (const auto& seg : env.segments(0.0, clock.inverse(n), Interval::LeftOpen)) {
    bound.large_jumps += seg.mass * seg.coef->kernel.mass(ck, kInf);
  }
  bound.quadratic = m2 * n / (std::pow(static_cast<double>(k), 2.0 / 3.0) * beta);
  for (double s : clock.big_jump_times(0.0, t)) {
    const Atom* atom = env.atom_at(s);
    double db1 = atom ? atom->coef.b1 * atom->mass : 0.0;
    bound.atom_drift += 0.5 * m2 * (1.0 - db1) * (1.0 - db1) / k;
  }
  for (const auto& seg : env.segments(0.0, t, Interval::LeftOpen)) {
    bound.small_jumps += 0.5 * m2 * seg.mass * seg.coef->kernel.moment(2.0, 0.0, cut);
  }
  for (const auto& a : env.atoms()) {
    if (a.time <= t && a.mass <= 2.0 / beta) {
      bound.small_atoms += model.c0() * (1.0 + cap) * (1.0 + cap) * a.mass;
    }
  }
  return bound;
}

//---------------------------------------------------------------------------//
std::vector<double> linear_grid(double a, double b, int n) {
  std::vector<double> out;
  if (n == 1) return {a};
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  out.back() = b;
  return out;
}

std::vector<CumulantSolution> exact_grid(const EnvironmentSpec& env,
                                         const ConvergenceReport& frame) {
  std::vector<CumulantSolution> out;
  for (double t : frame.times) {
    std::vector<double> rs;
    for (double r : frame.times) {
      if (r <= t) rs.push_back(r);
    }
    out.push_back(solve_grid(env, t, rs, frame.lambdas, frame.options.tol));
  }
  return out;
}

ConvergenceRow convergence_row(const EnvironmentSpec& env,
                               const DiscreteModel& model,
                               const ConvergenceReport& frame,
                               const std::vector<CumulantSolution>& exact) {
  ConvergenceRow row;
  row.k = model.level();
  row.beta = model.beta();
  row.generations = model.generations();
  row.downgrades = model.downgrades().size();
  row.min_vk = kInf;
  row.max_vk = 0.0;
  const auto& env_bounds = frame.envelope;
  for (std::size_t ti = 0; ti < frame.times.size(); ++ti) {
    const auto& sol = exact[ti];
    for (std::size_t li = 0; li < frame.lambdas.size(); ++li) {
      double lambda = frame.lambdas[li];
      auto vk = discrete_cumulant_path(model, sol.t, lambda, sol.rs);
      for (std::size_t ri = 0; ri < sol.rs.size(); ++ri) {
        double v = sol.values[li][ri];
        row.sup_error = std::max(row.sup_error, std::abs(vk[ri] - v));
        row.sup_d_error =
            std::max(row.sup_d_error, std::abs(std::exp(-vk[ri]) - std::exp(-v)));
        row.min_vk = std::min(row.min_vk, vk[ri]);
        row.max_vk = std::max(row.max_vk, vk[ri]);
        if (frame.envelope_ok) {
          ++row.corridor_checked;
          if (vk[ri] < env_bounds.lower || vk[ri] > env_bounds.upper) {
            ++row.corridor_violations;
          }
        }
      }
    }
  }
  auto lambdas = linear_grid(0.0, frame.options.b, frame.options.residual_lambda_points);
  lambdas.erase(lambdas.begin());
  double horizon = frame.options.horizon;
  row.residual_sum = condition_a_residuals(model, env, 0.0, horizon, lambdas).sum_total;
  row.residual_bound = condition_a_bound(model, env, horizon, frame.options.b).total();
  return row;
}

ConvergenceReport convergence_frame(const EnvironmentSpec& env,
                                    const ConvergenceOptions& options) {
  ConvergenceReport report;
  report.options = options;
  report.lambdas = linear_grid(options.a, options.b, options.lambda_points);
  report.times = linear_grid(0.0, options.horizon, options.time_points);
  try {
    report.envelope = envelope_bounds(env, options.horizon, options.a, options.b,
                                      options.eta);
  } catch (const EnvelopeInapplicable& e) {
    report.envelope_ok = false;
    report.envelope_error = e.what();
  }
  return report;
}

ConvergenceReport convergence_report(const EnvironmentSpec& env,
                                     const std::vector<int>& ks,
                                     const ConvergenceOptions& options) {
  ConvergenceReport report = convergence_frame(env, options);
  auto exact = exact_grid(env, report);
  for (int k : ks) {
    auto model = build_discrete_model(env, k, options.theta);
    report.rows.push_back(convergence_row(env, model, report, exact));
  }
  return report;
}

}  // namespace cbve
