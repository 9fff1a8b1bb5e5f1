// SPDX-License-Identifier: Apache-2.0
#include "cbve/cumulant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbve/error.hpp"
#include "cbve/mechanism.hpp"

namespace cbve {
namespace {

constexpr int kMaxSteps = 10'000'000;

double rk4(double density, const Coefficients& coef, double y, double h) {
  auto f = [&](double v) { return -density * phi(coef, v); };
  double k1v = f(y);
  double k2v = f(y + 0.5 * h * k1v);
  double k3v = f(y + 0.5 * h * k2v);
  double k4v = f(y + h * k3v);
  return y + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

[[noreturn]] void negative(double s, double v) {
  std::ostringstream os;
  os << "v = " << v << " < 0 at s = " << s;
  throw NegativeCumulant("cumulant", "solve_backward", os.str());
}

}  // namespace

BackwardSolver::BackwardSolver(const EnvironmentSpec& env, double t,
                               double lambda, double tol)
    : env_(&env), tol_(tol), time_(t), value_(lambda) {
  if (!(t >= 0.0) || t > env.horizon()) {
    throw InvalidArgument("cumulant", "solve_backward", "t outside [0, T]");
  }
  if (!(lambda >= 0.0)) {
    throw InvalidArgument("cumulant", "solve_backward", "lambda must be >= 0");
  }
}

void BackwardSolver::advance_to(double r) {
  if (!(r >= 0.0) || r > time_) {
    throw InvalidArgument("cumulant", "solve_backward", "need 0 <= r <= t");
  }
  auto segs = env_->segments(r, time_, Interval::LeftOpen);
  for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
    if (it->atom) {
      value_ -= phi(*it->coef, value_) * it->mass;
      if (value_ < 0.0) negative(it->start, value_);
    } else {
      flow(it->density(), *it->coef, it->end - it->start);
      if (value_ < 0.0) negative(it->start, value_);
    }
  }
  time_ = r;
}

void BackwardSolver::flow(double density, const Coefficients& coef,
                          double span) {
  if (span <= 0.0 || density == 0.0) return;
  double done = 0.0;
  double h = span / 8.0;
  for (int step = 0; done < span; ++step) {
    if (step > kMaxSteps) {
      throw NonConvergence("cumulant", "solve_backward", "step budget exhausted");
    }
    h = std::min(h, span - done);
    double full = rk4(density, coef, value_, h);
    double half = rk4(density, coef, value_, 0.5 * h);
    half = rk4(density, coef, half, 0.5 * h);
    double err = std::abs(half - full) / 15.0;
    double allowed = tol_ * std::max(1.0, std::abs(value_)) * h / span;
    if (std::isfinite(err) && err <= allowed) {
      value_ = half;
      error_ += err;
      done += h;
      double grow = err > 0.0 ? 0.9 * std::pow(allowed / err, 0.2) : 2.0;
      h *= std::clamp(grow, 0.2, 2.0);
      continue;
    }
    if (h <= span * 1e-14) {
      throw NonConvergence("cumulant", "solve_backward", "step size underflow");
    }
    double shrink = std::isfinite(err) ? 0.9 * std::pow(allowed / err, 0.2) : 0.1;
    h *= std::clamp(shrink, 0.1, 0.5);
  }
}

Estimate solve_backward(const EnvironmentSpec& env, double r, double t,
                        double lambda, double tol) {
  BackwardSolver solver(env, t, lambda, tol);
  solver.advance_to(r);
  return {solver.value(), solver.error()};
}

CumulantSolution solve_grid(const EnvironmentSpec& env, double t,
                            std::vector<double> rs, std::vector<double> lambdas,
                            double tol) {
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  CumulantSolution out;
  out.t = t;
  out.rs = rs;
  out.lambdas = lambdas;
  for (double lambda : lambdas) {
    std::vector<double> values(rs.size());
    std::vector<double> errors(rs.size());
    BackwardSolver solver(env, t, lambda, tol);
    for (std::size_t i = rs.size(); i-- > 0;) {
      if (rs[i] > t) {
        throw InvalidArgument("cumulant", "solve_grid", "grid point beyond t");
      }
      solver.advance_to(rs[i]);
      values[i] = solver.value();
      errors[i] = solver.error();
    }
    out.values.push_back(std::move(values));
    out.errors.push_back(std::move(errors));
  }
  return out;
}

std::vector<double> default_r_grid(const EnvironmentSpec& env, double t, int n) {
  std::vector<double> rs;
  for (int i = 0; i < n; ++i) rs.push_back(t * i / std::max(1, n - 1));
  for (const auto& a : env.atoms()) {
    if (a.time <= t) rs.push_back(a.time);
  }
  for (const auto& p : env.pieces()) {
    if (p.start <= t) rs.push_back(p.start);
    if (p.end <= t) rs.push_back(p.end);
  }
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  return rs;
}

double transition_laplace(const EnvironmentSpec& env, double x, double r,
                          double t, double lambda, double tol) {
  if (!(x >= 0.0)) {
    throw InvalidArgument("cumulant", "transition_laplace", "x must be >= 0");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return std::exp(-x * solve_backward(env, r, t, lambda, tol).value);
}

//---------------------------------------------------------------------------//
double EnvelopeConstants::alpha(double r) const {
  auto it = std::upper_bound(alpha_times.begin(), alpha_times.end(), r);
  if (it == alpha_times.begin()) return 0.0;
  std::size_t i = static_cast<std::size_t>(it - alpha_times.begin()) - 1;
  if (i + 1 == alpha_times.size() || alpha_times[i] == r) return alpha_values[i];
  double t0 = alpha_times[i];
  double t1 = alpha_times[i + 1];
  return alpha_values[i] +
         (alpha_values[i + 1] - alpha_values[i]) * (r - t0) / (t1 - t0);
}

double envelope_density(const Coefficients& coef, const EnvelopeConstants& e) {
  const auto& m = coef.kernel;
  double u = e.upper;
  return -0.5 * u * m.moment(2.0, 0.0, e.epsilon) +
         e.h * m.moment(1.0, 1.0, e.eta) - coef.b1 - u * coef.c -
         (1.0 - e.f) * m.moment(1.0, e.epsilon, 1.0);
}

EnvelopeConstants envelope_bounds(const EnvironmentSpec& env, double horizon,
                                  double a, double b, double eta) {
  if (!(a > 0.0) || a > b) {
    throw InvalidArgument("cumulant", "envelope_bounds", "need 0 < a <= b");
  }
  EnvelopeConstants e;
  e.horizon = horizon;
  e.a = a;
  e.b = b;
  e.eta = eta;
  e.c0 = compute_c0(env);
  double g = env.gamma(horizon);
  e.upper = (b + e.c0 * g + 1.0) * std::exp(e.c0 * g);
  e.f = -std::expm1(-e.upper) / e.upper;
  e.h = -std::expm1(-eta * e.upper) / (eta * e.upper);
  e.epsilon = std::min(1.0, e.f / e.upper);

  double alpha = 0.0;
  e.alpha_times.push_back(0.0);
  e.alpha_values.push_back(0.0);
  for (const auto& seg : env.segments(0.0, horizon, Interval::LeftOpen)) {
    double d = envelope_density(*seg.coef, e) * seg.mass;
    if (seg.atom) {
      if (d <= -1.0) {
        std::ostringstream os;
        os << "jump of alpha = " << d << " <= -1 at atom t = " << seg.start;
        throw EnvelopeInapplicable("cumulant", "envelope_bounds", os.str());
      }
      e.alpha_times.push_back(seg.start);
      e.alpha_values.push_back(alpha);
      e.atom_product *= 1.0 + std::min(0.0, d);
    } else if (e.alpha_times.back() != seg.start) {
      e.alpha_times.push_back(seg.start);
      e.alpha_values.push_back(alpha);
    }
    alpha += d;
    e.total_variation += std::abs(d);
    e.alpha_times.push_back(seg.end);
    e.alpha_values.push_back(alpha);
  }
  e.lower = 0.5 * a * e.atom_product * std::exp(-e.total_variation);
  return e;
}

}  // namespace cbve
