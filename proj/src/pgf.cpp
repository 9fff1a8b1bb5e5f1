// SPDX-License-Identifier: Apache-2.0
#include "cbve/pgf.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "cbve/error.hpp"

namespace cbve {
namespace {

ExpPoly term_shape(bool compensated) {
  return compensated ? ExpPoly::compensated() : ExpPoly::uncompensated();
}

// int y^{n-1-alpha} e^{-y} dy / n! over [lo, hi]
double gamma_slice(int n, double alpha, double lo, double hi) {
  double s = n - alpha;
  double diff;
  if (lo > s) {
    double qlo = boost::math::gamma_q(s, lo);
    double qhi = std::isinf(hi) ? 0.0 : boost::math::gamma_q(s, hi);
    diff = qlo - qhi;
  } else {
    double plo = lo > 0.0 ? boost::math::gamma_p(s, lo) : 0.0;
    double phi = std::isinf(hi) ? 1.0 : boost::math::gamma_p(s, hi);
    diff = phi - plo;
  }
  return diff * std::exp(std::lgamma(s) - std::lgamma(n + 1.0));
}

}  // namespace

Pgf::Pgf(double e1, double e2, std::vector<PoissonTerm> poisson,
         std::vector<PowerLawTerm> power_law)
    : e1_(e1), e2_(e2), poisson_(std::move(poisson)),
      power_law_(std::move(power_law)) {
  for (const auto& t : poisson_) {
    if (!(t.weight >= 0.0) || !(t.rate >= 0.0)) {
      throw InvalidArgument("discrete", "Pgf", "term weights and rates must be >= 0");
    }
  }
  for (const auto& t : power_law_) {
    if (!(t.weight >= 0.0) || !(t.rate > 0.0)) {
      throw InvalidArgument("discrete", "Pgf", "term weights and rates must be >= 0");
    }
  }
}

Pgf Pgf::quadratic(double p0, double p1, double p2) {
  if (p0 < 0.0 || p1 < 0.0 || p2 < 0.0 || std::abs(p0 + p1 + p2 - 1.0) > 1e-12) {
    throw InvalidArgument("discrete", "Pgf", "quadratic pgf needs a probability vector");
  }
  return Pgf(1.0 - p1 - 2.0 * p2, p2, {});
}

Pgf Pgf::poisson(double mu) { return Pgf(1.0 - mu, 0.0, {{1.0, mu, true}}); }

bool Pgf::is_identity() const {
  return e1_ == 0.0 && e2_ == 0.0 && poisson_.empty() && power_law_.empty();
}

double Pgf::operator()(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw InvalidArgument("discrete", "pgf_eval", "u outside [0, 1]");
  }
  if (is_identity()) return u;
  return 1.0 - deficit(1.0 - u);
}

double Pgf::excess(double x) const {
  double sum = e1_ * x + e2_ * x * x;
  for (const auto& t : poisson_) {
    double y = t.rate * x;
    sum += t.weight * (t.compensated ? compensated_exp(y) : std::expm1(-y));
  }
  for (const auto& t : power_law_) {
    sum += t.weight * t.kernel.integrate(term_shape(t.compensated), t.rate * x).value;
  }
  return sum;
}

double Pgf::mean() const {
  double m = 1.0 - e1_;
  for (const auto& t : poisson_) {
    if (!t.compensated) m += t.weight * t.rate;
  }
  for (const auto& t : power_law_) {
    if (!t.compensated) m += t.weight * t.rate * t.kernel.moment(1.0);
  }
  return m;
}

double Pgf::slope_at_zero() const {
  double d = e1_ + 2.0 * e2_;
  for (const auto& t : poisson_) {
    double eps = t.compensated ? 1.0 : 0.0;
    d += t.weight * t.rate * (eps - std::exp(-t.rate));
  }
  for (const auto& t : power_law_) {
    ExpPoly h{0.0, t.compensated ? 1.0 : 0.0, 0.0, -1.0};
    d += t.weight * t.kernel.integrate(h, t.rate).value;
  }
  return 1.0 - d;
}

double Pgf::coefficient(int n) const {
  if (n < 0) return 0.0;
  if (n == 0) return at_zero();
  if (n == 1) return slope_at_zero();
  double c = n == 2 ? e2_ : 0.0;
  for (const auto& t : poisson_) {
    if (t.rate > 0.0) {
      c += t.weight *
           std::exp(n * std::log(t.rate) - t.rate - std::lgamma(n + 1.0));
    }
  }
  for (const auto& t : power_law_) {
    const auto& p = t.kernel;
    c += t.weight * p.scale * std::pow(t.rate, p.alpha) *
         gamma_slice(n, p.alpha, t.rate * p.zmin, t.rate * p.zmax);
  }
  return c;
}

double compose(const std::vector<const Pgf*>& chain, double u) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) u = (**it)(u);
  return u;
}

}  // namespace cbve
