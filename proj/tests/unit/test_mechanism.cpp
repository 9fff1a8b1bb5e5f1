// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cbve/error.hpp"
#include "cbve/mechanism.hpp"
#include "cbve/scenarios.hpp"
#include "test_support.hpp"

namespace cbve {
namespace {

Coefficients coef(double b1, double c, JumpKernel m = {}) {
  Coefficients x;
  x.b1 = b1;
  x.c = c;
  x.kernel = std::move(m);
  return x;
}

TEST(Phi, Examples) {
  EXPECT_EQ(phi(coef(1.0, 0.0), 2.0), 2.0);
  EXPECT_EQ(phi(coef(0.0, 1.0), 3.0), 9.0);
  EXPECT_NEAR(phi(coef(0.0, 0.0, JumpKernel::atomic({{1.0, 1.0}})), 1.0), std::exp(-1.0),
              1e-15);
}

TEST(Phi, ZeroAtOrigin) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 20; ++i) {
    auto env = test::random_environment(gen);
    for (double s : {0.0, 0.3, 0.77, 1.0}) EXPECT_EQ(phi(env, s, 0.0), 0.0);
  }
}

TEST(Phi0k, Examples) {
  EXPECT_EQ(phi0k(coef(0.0, 1.0), 2.0, 3.0), 4.0);
  EXPECT_NEAR(phi0k(coef(0.0, 0.0, JumpKernel::atomic({{1.0, 1.0}})), 1.0, 2.0),
              std::exp(-1.0), 1e-15);
  EXPECT_NEAR(truncation_cutoff(1000, 1.0), 9.0, 1e-12);
}

TEST(Phi0k, RejectsSmallLevel) {
  EnvironmentSpec env(1.0, {{0.0, 1.0, 1.0, coef(1.0, 0.0)}}, {});
  // c_k = 8^{1/3} - 1 = 1 is the smallest admissible level at C0 = 1.
  EXPECT_NO_THROW(phi0k(env, 0.5, 1.0, 8, 1.0));
  try {
    phi0k(env, 0.5, 1.0, 7, 1.0);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("1 <= c_k <= k"), std::string::npos) << e.what();
  }
}

TEST(Phi0k, TwoFormsAgree) {
  // phi0k = phi - b_k lambda - int_(c_k, inf) (e^{-lambda z} - 1) m(dz)
  JumpKernel m = JumpKernel::atomic({{0.4, 0.7}, {1.5, 0.3}, {3.0, 0.2}, {12.0, 0.1}});
  for (double ck : {1.0, 2.0, 5.0, 20.0}) {
    Coefficients c = coef(0.3, 0.4, m);
    for (double lambda : {0.1, 1.0, 3.7}) {
      double first = phi(c, lambda) - drift_k(c, ck) * lambda -
                     m.exp_integral(lambda, ck).value;
      EXPECT_NEAR(phi0k(c, lambda, ck), first, 1e-10) << ck << " " << lambda;
    }
  }
  // Same for a power law, whose tail integral is closed-form.
  Coefficients p = coef(-0.2, 0.1, JumpKernel::power_law({1.3, 0.5, 0.0, 40.0}));
  for (double ck : {1.0, 3.0}) {
    for (double lambda : {0.5, 2.0}) {
      double first = phi(p, lambda) - drift_k(p, ck) * lambda -
                     p.kernel.exp_integral(lambda, ck).value;
      EXPECT_NEAR(phi0k(p, lambda, ck), first, 1e-10);
    }
  }
}

TEST(PhiBounds, Examples) {
  EXPECT_EQ(phi_bound(1.0, 1.0), 4.0);
  EXPECT_EQ(phi_bound(2.0, 0.0), 2.0);
  double m = 2.0 + std::exp(-1.0);
  EXPECT_NEAR(phi_lipschitz_bound(1.0, 1.0, 1.0), m * m, 1e-14);
  EXPECT_NEAR(phi_lipschitz_bound(1.0, 1.0, 1.0), 5.606853, 1e-6);
  EXPECT_THROW(phi_lipschitz_bound(1.0, 0.0, 1.0), InvalidArgument);
}

TEST(PhiBounds, RandomEnvironments) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int e = 0; e < 10; ++e) {
    auto env = test::random_environment(gen);
    double c0 = compute_c0(env);
    for (int i = 0; i < 1000; ++i) {
      double s = u(gen);
      double lambda = 10.0 * u(gen);
      double v = phi(env, s, lambda);
      ASSERT_LE(std::abs(v), phi_bound(c0, lambda) * (1.0 + 1e-12));
      ASSERT_GE(v, -c0 * (1.0 + lambda) * (1.0 + 1e-12));
      double l1 = 1e-3 + 5.0 * u(gen);
      double l2 = l1 + 5.0 * u(gen);
      double lhs = std::abs(phi(env, s, l1) - phi(env, s, l2));
      ASSERT_LE(lhs, phi_lipschitz_bound(c0, l1, l2) * (l2 - l1) * (1.0 + 1e-12) + 1e-14);
    }
  }
}

TEST(Phi, ConvexAfterDrift) {
  std::mt19937_64 gen(9);
  for (int e = 0; e < 10; ++e) {
    auto env = test::random_environment(gen);
    for (double s : {0.05, 0.5, 0.95}) {
      const auto& c = env.coefficients(s);
      auto f = [&](double l) { return phi(c, l) - c.b1 * l; };
      const double h = 1e-2;
      for (double l = h; l < 8.0; l += 0.25) {
        double second = (f(l + h) - 2.0 * f(l) + f(l - h)) / (h * h);
        ASSERT_GE(second, -1e-9) << l;
      }
    }
  }
}

TEST(Phi, BuiltinScenariosWithinBounds) {
  for (const auto& name : list_builtin_scenarios()) {
    auto env = builtin_scenario(name);
    MechanismView view(env);
    for (double s = 0.0; s <= 1.0; s += 0.01) {
      for (double lambda : {0.0, 0.5, 2.0, 6.0}) {
        EXPECT_LE(std::abs(view.phi(s, lambda)), view.bound(lambda) * (1.0 + 1e-12) + 1e-300)
            << name;
      }
    }
  }
}

}  // namespace
}  // namespace cbve
