// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cbve/discrete.hpp"
#include "cbve/error.hpp"
#include "cbve/pgf.hpp"

namespace cbve {
namespace {

// Structural invariants every valid pgf must satisfy.
void expect_valid(const Pgf& g, const std::string& label) {
  EXPECT_NEAR(g(1.0), 1.0, 1e-12) << label;
  EXPECT_GE(g(0.0), 0.0) << label;
  EXPECT_TRUE(std::isfinite(g.mean())) << label;
  for (int n = 0; n <= 12; ++n) EXPECT_GE(g.coefficient(n), -1e-14) << label << " n=" << n;
  double prev = g(0.0);
  double prev_slope = -kInf;
  const int steps = 200;
  for (int i = 1; i <= steps; ++i) {
    double u = static_cast<double>(i) / steps;
    double v = g(u);
    EXPECT_GE(v, prev - 1e-15) << label << " u=" << u;
    double slope = (v - prev) * steps;
    EXPECT_GE(slope, prev_slope - 1e-9) << label << " u=" << u;
    prev = v;
    prev_slope = slope;
  }
}

TEST(Pgf, Identity) {
  Pgf g;
  EXPECT_TRUE(g.is_identity());
  for (double u : {0.0, 0.3, 1.0}) EXPECT_EQ(g(u), u);
  EXPECT_EQ(g.mean(), 1.0);
}

TEST(Pgf, Quadratic) {
  auto g = Pgf::quadratic(0.2, 0.6, 0.2);
  EXPECT_DOUBLE_EQ(g.coefficient(0), 0.2);
  EXPECT_DOUBLE_EQ(g.coefficient(1), 0.6);
  EXPECT_DOUBLE_EQ(g.coefficient(2), 0.2);
  EXPECT_EQ(g.coefficient(3), 0.0);
  EXPECT_DOUBLE_EQ(g(0.5), 0.2 + 0.3 + 0.05);
  EXPECT_DOUBLE_EQ(g.mean(), 1.0);
  EXPECT_THROW(Pgf::quadratic(0.5, 0.6, 0.2), InvalidArgument);
  EXPECT_THROW(Pgf::quadratic(-0.1, 0.9, 0.2), InvalidArgument);
}

TEST(Pgf, AuxiliaryQuadratic) {
  auto g = auxiliary_quadratic_pgf(0.1, 0.0);
  EXPECT_NEAR(g.coefficient(0), 0.2, 1e-15);
  EXPECT_NEAR(g.coefficient(1), 0.6, 1e-15);
  EXPECT_NEAR(g.coefficient(2), 0.2, 1e-15);
  auto h = auxiliary_quadratic_pgf(0.05, 0.1);
  EXPECT_NEAR(h.coefficient(0), 0.3, 1e-15);
  EXPECT_NEAR(h.coefficient(1), 0.6, 1e-15);
  EXPECT_NEAR(h.coefficient(2), 0.1, 1e-15);
}

TEST(Pgf, Poisson) {
  auto g = Pgf::poisson(0.5);
  EXPECT_NEAR(g(0.0), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(g.at_zero(), 0.6065306597126334, 1e-15);
  EXPECT_NEAR(g.coefficient(1), 0.5 * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(g.coefficient(3), std::pow(0.5, 3) / 6.0 * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(g.mean(), 0.5, 1e-15);
  EXPECT_NEAR(g.slope_at_zero(), 0.5 * std::exp(-0.5), 1e-15);
  for (double u : {0.1, 0.5, 0.9}) EXPECT_NEAR(g(u), std::exp(0.5 * (u - 1.0)), 1e-15);
}

TEST(Pgf, RejectsOutOfRange) {
  auto g = Pgf::poisson(1.0);
  EXPECT_THROW(g(-0.1), InvalidArgument);
  EXPECT_THROW(g(1.1), InvalidArgument);
  EXPECT_THROW(Pgf(0.5, 0.0, {{-1.0, 1.0, false}}), InvalidArgument);
}

TEST(Pgf, ExcessKeepsPrecisionNearOne) {
  // E(x) for Poisson(1) is e^{-x} - 1 + x, about x^2 / 2.
  auto g = Pgf::poisson(1.0);
  for (double x : {1e-12, 1e-8, 1e-4}) {
    double want = x * x / 2.0 * (1.0 - x / 3.0 + x * x / 12.0);
    EXPECT_NEAR(g.excess(x) / want, 1.0, 1e-12) << x;
    EXPECT_NEAR(g.deficit(x), x - g.excess(x), 0.0);
  }
}

TEST(Pgf, PowerLawTermMatchesSeries) {
  // E(x) = w int (e^{-z x} - 1) z^{-1-alpha} dz over [1, 3], uncompensated.
  PowerLawTerm t{0.3, PowerLaw{0.7, 1.0, 1.0, 3.0}, 1.0, false};
  Pgf g(0.3 * PowerLaw{0.7, 1.0, 1.0, 3.0}.moment(0.0), 0.0, {}, {t});
  expect_valid(g, "power law");
  // Mean is 1 - e1 + w int z m(dz).
  double w_mean = 0.3 * PowerLaw{0.7, 1.0, 1.0, 3.0}.moment(1.0);
  EXPECT_NEAR(g.mean(), 1.0 - g.e1() + w_mean, 1e-12);
}

TEST(Pgf, MixturesAreValid) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    double q = 0.1 * u(gen);
    double b = 0.05 * u(gen);
    auto aux = auxiliary_quadratic_pgf(q, b);
    expect_valid(aux, "aux");
    double mu = 3.0 * u(gen);
    expect_valid(Pgf::poisson(mu), "poisson");
  }
}

TEST(Compose, Examples) {
  Pgf id;
  auto sq = Pgf::quadratic(0.0, 0.0, 1.0);
  EXPECT_EQ(compose({&id, &id, &id}, 0.37), 0.37);
  EXPECT_DOUBLE_EQ(compose({&sq, &sq}, 0.5), 0.0625);
  auto step2 = Pgf::poisson(0.5);
  EXPECT_NEAR(compose({&step2}, 0.0), std::exp(-0.5), 1e-15);
  // Order: g1(g2(u)).
  auto p = Pgf::poisson(1.0);
  EXPECT_NEAR(compose({&sq, &p}, 0.2), std::pow(std::exp(-0.8), 2), 1e-15);
  EXPECT_NEAR(compose({&p, &sq}, 0.2), std::exp(0.04 - 1.0), 1e-15);
}

}  // namespace
}  // namespace cbve
