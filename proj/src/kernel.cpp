// SPDX-License-Identifier: Apache-2.0
#include "cbve/kernel.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cbve/error.hpp"

namespace cbve {
namespace {

constexpr double kSeriesCutoff = 0.1;

// Taylor coefficient of y^n in h.
double taylor_coefficient(const ExpPoly& h, int n) {
  double c = 0.0;
  if (n == 0) c += h.p0 + h.q0;
  if (n == 1) c += h.p1;
  if (n >= 1) {
    // (-1)^n / n! and (-1)^{n-1} / (n-1)!
    double inv_fact = 1.0;
    for (int j = 2; j <= n; ++j) inv_fact /= j;
    double sign = (n % 2 == 0) ? 1.0 : -1.0;
    c += h.q0 * sign * inv_fact;
    c += h.q1 * (-sign) * inv_fact * n;
  }
  return c;
}

bool is_zero(double x) { return x == 0.0; }

}  // namespace

//---------------------------------------------------------------------------//
double compensated_exp(double y) {
  if (std::abs(y) < kSeriesCutoff) {
    // y^2 / 2 (1 - y/3 (1 - y/4 (...))), nested from the top.
    double u = 1.0;
    for (int m = 13; m >= 0; --m) u = 1.0 - y / (m + 3.0) * u;
    return 0.5 * y * y * u;
  }
  return std::expm1(-y) + y;
}

double k1(double lambda, double z) {
  double y = lambda * z;
  return z <= 1.0 ? compensated_exp(y) : std::expm1(-y);
}

double k_func(double lambda, double z) { return compensated_exp(lambda * z); }

//---------------------------------------------------------------------------//
double ExpPoly::operator()(double y) const {
  if (y < 0.05) {
    double sum = 0.0;
    double yn = 1.0;
    for (int n = 0; n <= 12; ++n) {
      double c = taylor_coefficient(*this, n);
      if (!is_zero(c)) sum += c * yn;
      yn *= y;
    }
    return sum;
  }
  return p0 + p1 * y + std::exp(-y) * (q0 + q1 * y);
}

double power_integral(double p, double lo, double hi) {
  if (lo > hi) {
    throw InvalidArgument("environment", "kernel_moments",
                          "lower bound exceeds upper bound");
  }
  if (lo == hi) return 0.0;
  double e = p + 1.0;
  if (std::isinf(hi)) {
    if (e >= 0.0) {
      throw DivergentIntegral("environment", "kernel_moments",
                              "power integral diverges at infinity");
    }
    return -std::pow(lo, e) / e;
  }
  if (lo == 0.0) {
    if (e <= 0.0) {
      throw DivergentIntegral("environment", "kernel_moments",
                              "power integral diverges at zero");
    }
    return std::pow(hi, e) / e;
  }
  if (e == 0.0) return std::log(hi / lo);
  return (std::pow(hi, e) - std::pow(lo, e)) / e;
}

double upper_gamma(double s, double x) {
  if (std::isinf(x)) return 0.0;
  if (s > 0.0) return boost::math::tgamma(s, x);
  if (s == 0.0) return boost::math::expint(1, x);
  return (upper_gamma(s + 1.0, x) - std::pow(x, s) * std::exp(-x)) / s;
}

Estimate power_exp_integral(double alpha, double lo, double hi,
                            const ExpPoly& h) {
  if (!(lo >= 0.0) || lo > hi) {
    throw InvalidArgument("environment", "kernel_moments",
                          "invalid integration bounds");
  }
  Estimate out;
  if (lo == hi) return out;

  if (lo < 1.0) {
    double a = lo;
    double b = std::min(hi, 1.0);
    double sum = 0.0;
    double last = 0.0;
    for (int n = 0; n <= 40; ++n) {
      double c = taylor_coefficient(h, n);
      if (is_zero(c)) continue;
      double term = c * power_integral(n - 1.0 - alpha, a, b);
      sum += term;
      last = std::abs(term);
      if (n >= 4 && last <= 1e-18 * std::max(std::abs(sum), 1e-300)) break;
    }
    out.value += sum;
    out.error += last + 4e-16 * std::abs(sum);
  }
  if (hi > 1.0) {
    double l = std::max(lo, 1.0);
    double part = 0.0;
    double scale = 0.0;
    auto add = [&](double t) {
      part += t;
      scale = std::max(scale, std::abs(t));
    };
    if (!is_zero(h.p0)) add(h.p0 * power_integral(-1.0 - alpha, l, hi));
    if (!is_zero(h.p1)) add(h.p1 * power_integral(-alpha, l, hi));
    if (!is_zero(h.q0)) {
      add(h.q0 * (upper_gamma(-alpha, l) - upper_gamma(-alpha, hi)));
    }
    if (!is_zero(h.q1)) {
      add(h.q1 * (upper_gamma(1.0 - alpha, l) - upper_gamma(1.0 - alpha, hi)));
    }
    out.value += part;
    out.error += 1e-14 * scale;
  }
  return out;
}

//---------------------------------------------------------------------------//
std::optional<PowerLaw> PowerLaw::restricted(double a, double b) const {
  double lo = std::max(a, zmin);
  double hi = std::min(b, zmax);
  if (!(lo < hi)) return std::nullopt;
  PowerLaw out = *this;
  out.zmin = lo;
  out.zmax = hi;
  return out;
}

double PowerLaw::moment(double p) const {
  return scale * power_integral(p - 1.0 - alpha, zmin, zmax);
}

Estimate PowerLaw::integrate(const ExpPoly& h, double rate) const {
  if (rate == 0.0) {
    double h0 = h.p0 + h.q0;
    return {is_zero(h0) ? 0.0 : h0 * moment(0.0), 0.0};
  }
  Estimate e = power_exp_integral(alpha, rate * zmin, rate * zmax, h);
  double f = scale * std::pow(rate, alpha);
  return {f * e.value, f * e.error};
}

//---------------------------------------------------------------------------//
JumpKernel::JumpKernel(std::vector<KernelAtom> atoms,
                       std::optional<PowerLaw> power_law)
    : atoms_(std::move(atoms)), power_law_(power_law) {
  for (const auto& a : atoms_) {
    if (!(a.z > 0.0) || !(a.w >= 0.0)) {
      throw InvalidArgument("environment", "JumpKernel",
                            "atomic kernel needs z > 0 and w >= 0");
    }
  }
  if (power_law_) {
    const auto& p = *power_law_;
    if (!(p.alpha > 0.0 && p.alpha < 2.0) || !(p.scale > 0.0) ||
        !(p.zmin >= 0.0) || !(p.zmin < p.zmax)) {
      throw InvalidArgument(
          "environment", "JumpKernel",
          "power law needs alpha in (0,2), scale > 0, 0 <= zmin < zmax");
    }
  }
}

bool JumpKernel::empty() const {
  return !power_law_ &&
         std::all_of(atoms_.begin(), atoms_.end(),
                     [](const KernelAtom& a) { return a.w == 0.0; });
}

JumpKernel JumpKernel::scaled(double f) const {
  if (f == 0.0) return {};
  auto atoms = atoms_;
  for (auto& a : atoms) a.w *= f;
  auto p = power_law_;
  if (p) p->scale *= f;
  return JumpKernel(std::move(atoms), p);
}

JumpKernel JumpKernel::restricted(double a, double b) const {
  std::vector<KernelAtom> atoms;
  for (const auto& x : atoms_) {
    if (x.z > a && x.z <= b) atoms.push_back(x);
  }
  std::optional<PowerLaw> p;
  if (power_law_) p = power_law_->restricted(a, b);
  return JumpKernel(std::move(atoms), p);
}

double JumpKernel::mass(double a, double b) const { return moment(0.0, a, b); }

double JumpKernel::moment(double p, double a, double b) const {
  if (a > b) {
    throw InvalidArgument("environment", "kernel_moments",
                          "lower bound exceeds upper bound");
  }
  double sum = 0.0;
  for (const auto& x : atoms_) {
    if (x.z > a && x.z <= b) sum += x.w * std::pow(x.z, p);
  }
  if (power_law_) {
    if (auto r = power_law_->restricted(a, b)) sum += r->moment(p);
  }
  return sum;
}

double JumpKernel::truncated_second_moment() const {
  return moment(2.0, 0.0, 1.0) + mass(1.0, kInf);
}

Estimate JumpKernel::integrate(const ExpPoly& h, double lambda, double a,
                               double b) const {
  if (a > b) {
    throw InvalidArgument("environment", "kernel_moments",
                          "lower bound exceeds upper bound");
  }
  Estimate out;
  for (const auto& x : atoms_) {
    if (x.z > a && x.z <= b) out.value += x.w * h(lambda * x.z);
  }
  if (power_law_) {
    if (auto r = power_law_->restricted(a, b)) {
      Estimate e = r->integrate(h, lambda);
      out.value += e.value;
      out.error += e.error;
    }
  }
  return out;
}

Estimate JumpKernel::k1_integral(double lambda) const {
  Estimate out;
  for (const auto& x : atoms_) out.value += x.w * k1(lambda, x.z);
  if (power_law_) {
    if (auto r = power_law_->restricted(0.0, 1.0)) {
      Estimate e = r->integrate(ExpPoly::compensated(), lambda);
      out.value += e.value;
      out.error += e.error;
    }
    if (auto r = power_law_->restricted(1.0, kInf)) {
      Estimate e = r->integrate(ExpPoly::uncompensated(), lambda);
      out.value += e.value;
      out.error += e.error;
    }
  }
  return out;
}

Estimate JumpKernel::k_integral(double lambda, double cutoff) const {
  Estimate out;
  for (const auto& x : atoms_) {
    if (x.z <= cutoff) out.value += x.w * k_func(lambda, x.z);
  }
  if (power_law_) {
    if (auto r = power_law_->restricted(0.0, cutoff)) {
      Estimate e = r->integrate(ExpPoly::compensated(), lambda);
      out.value += e.value;
      out.error += e.error;
    }
  }
  return out;
}

Estimate JumpKernel::exp_integral(double lambda, double lower) const {
  Estimate out;
  for (const auto& x : atoms_) {
    if (x.z > lower) out.value += x.w * std::expm1(-lambda * x.z);
  }
  if (power_law_) {
    if (auto r = power_law_->restricted(lower, kInf)) {
      Estimate e = r->integrate(ExpPoly::uncompensated(), lambda);
      out.value += e.value;
      out.error += e.error;
    }
  }
  return out;
}

}  // namespace cbve
