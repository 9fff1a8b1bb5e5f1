// SPDX-License-Identifier: Apache-2.0
#include "cbve/sampling.hpp"

#include <cmath>

#include "cbve/error.hpp"

namespace cbve {
namespace {

std::int64_t binomial_inversion(RandomStream& rng, std::int64_t n, double p) {
  double q = 1.0 - p;
  double s = p / q;
  double a = (static_cast<double>(n) + 1.0) * s;
  for (;;) {
    double r = std::pow(q, static_cast<double>(n));
    double u = rng.uniform();
    std::int64_t x = 0;
    while (u > r) {
      u -= r;
      ++x;
      if (x > n) break;
      r *= a / static_cast<double>(x) - s;
    }
    if (x <= n) return x;
  }
}

// Hormann (1993), transformed rejection with squeeze.
std::int64_t binomial_btrs(RandomStream& rng, std::int64_t n, double p) {
  double nd = static_cast<double>(n);
  double q = 1.0 - p;
  double spq = std::sqrt(nd * p * q);
  double b = 1.15 + 2.53 * spq;
  double a = -0.0873 + 0.0248 * b + 0.01 * p;
  double c = nd * p + 0.5;
  double vr = 0.92 - 4.2 / b;
  // Constants of the exact test, computed on the first squeeze miss.
  bool ready = false;
  double alpha = 0.0;
  double lpq = 0.0;
  double m = 0.0;
  double h = 0.0;
  for (;;) {
    double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    double us = 0.5 - std::abs(u);
    double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0.0 || k > nd) continue;
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (!ready) {
      alpha = (2.83 + 5.1 / b) * spq;
      lpq = std::log(p / q);
      m = std::floor((nd + 1.0) * p);
      h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);
      ready = true;
    }
    v = std::log(v * alpha / (a / (us * us) + b));
    if (v <= h - std::lgamma(k + 1.0) - std::lgamma(nd - k + 1.0) + (k - m) * lpq) {
      return static_cast<std::int64_t>(k);
    }
  }
}

std::int64_t poisson_inversion(RandomStream& rng, double mu) {
  double p = std::exp(-mu);
  double cdf = p;
  double u = rng.uniform();
  std::int64_t x = 0;
  while (u > cdf && p > 0.0) {
    ++x;
    p *= mu / static_cast<double>(x);
    cdf += p;
  }
  return x;
}

// Hormann (1993), transformed rejection with squeeze.
std::int64_t poisson_ptrs(RandomStream& rng, double mu) {
  double slam = std::sqrt(mu);
  double loglam = std::log(mu);
  double b = 0.931 + 2.53 * slam;
  double a = -0.059 + 0.02483 * b;
  double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    double us = 0.5 - std::abs(u);
    double k = std::floor((2.0 * a / us + b) * u + mu + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mu + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

}  // namespace

std::int64_t sample_binomial(RandomStream& rng, std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - sample_binomial(rng, n, 1.0 - p);
  if (static_cast<double>(n) * p < 10.0) return binomial_inversion(rng, n, p);
  return binomial_btrs(rng, n, p);
}

std::int64_t sample_poisson(RandomStream& rng, double mu) {
  if (!(mu > 0.0)) return 0;
  if (mu < 10.0) return poisson_inversion(rng, mu);
  return poisson_ptrs(rng, mu);
}

std::int64_t sample_poisson_at_least_two(RandomStream& rng, double mu) {
  if (!(mu > 0.0)) {
    throw InvalidArgument("simulate", "sample_poisson_at_least_two", "mu must be > 0");
  }
  if (mu >= 2.0) {
    for (;;) {
      std::int64_t n = sample_poisson(rng, mu);
      if (n >= 2) return n;
    }
  }
  // P(N = n | N >= 2) proportional to 2 mu^{n-2} / n!, summing to t.
  double t = 0.0;
  double term = 1.0;
  for (int n = 2; term > 1e-18 * t || n == 2; ++n) {
    t += term;
    term *= mu / (n + 1);
  }
  double u = rng.uniform() * t;
  std::int64_t n = 2;
  term = 1.0;
  while (u > term) {
    u -= term;
    term *= mu / static_cast<double>(n + 1);
    ++n;
    if (term == 0.0) break;
  }
  return n;
}

double sample_power_law_rate(RandomStream& rng, const PowerLaw& kernel, double rate) {
  double alpha = kernel.alpha;
  double lo = rate * kernel.zmin;
  double hi = rate * kernel.zmax;
  const double knee = std::sqrt(2.0);
  // Envelope y^{-1-alpha} min(y^2/2, 1), split at the knee.
  double a_lo = std::min(lo, knee);
  double a_hi = std::min(hi, knee);
  double b_lo = std::max(lo, knee);
  double b_hi = std::max(hi, knee);
  double ea = 2.0 - alpha;
  double mass_a = a_hi > a_lo ? (std::pow(a_hi, ea) - std::pow(a_lo, ea)) / (2.0 * ea) : 0.0;
  double mass_b = 0.0;
  if (b_hi > b_lo) {
    double top = std::isinf(b_hi) ? 0.0 : std::pow(b_hi, -alpha);
    mass_b = (std::pow(b_lo, -alpha) - top) / alpha;
  }
  if (!(mass_a + mass_b > 0.0)) {
    throw InvalidArgument("simulate", "sample_power_law_rate", "empty support");
  }
  const ExpPoly target = ExpPoly::tail_mass();
  for (;;) {
    double y;
    if (rng.uniform() * (mass_a + mass_b) < mass_a) {
      double l = std::pow(a_lo, ea);
      y = std::pow(l + rng.uniform() * (std::pow(a_hi, ea) - l), 1.0 / ea);
    } else {
      double l = std::pow(b_lo, -alpha);
      double top = std::isinf(b_hi) ? 0.0 : std::pow(b_hi, -alpha);
      y = std::pow(l - rng.uniform() * (l - top), -1.0 / alpha);
    }
    double envelope = std::min(0.5 * y * y, 1.0);
    if (rng.uniform() * envelope <= target(y)) return y;
  }
}

}  // namespace cbve
