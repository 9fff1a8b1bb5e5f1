// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cbve/cumulant.hpp"
#include "cbve/error.hpp"
#include "cbve/mechanism.hpp"
#include "cbve/scenarios.hpp"
#include "test_support.hpp"

namespace cbve {
namespace {

constexpr double kTol = 1e-10;

EnvironmentSpec flow(double b1, double c, double horizon = 1.0) {
  Coefficients x;
  x.b1 = b1;
  x.c = c;
  return EnvironmentSpec(horizon, {{0.0, horizon, 1.0, x}}, {});
}

EnvironmentSpec single_atom() {
  Coefficients x;
  x.b1 = 0.5;
  return EnvironmentSpec(2.0, {}, {{1.0, 1.0, x}});
}

// Fixed-step RK4 backward over each constant-coefficient segment of (r, t],
// atoms applied as explicit jumps.
double reference_rk4(const EnvironmentSpec& env, double r, double t, double lambda,
                     int steps_per_segment) {
  auto segs = env.segments(r, t, Interval::LeftOpen);
  double v = lambda;
  for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
    const Coefficients& c = *it->coef;
    if (it->atom) {
      v -= phi(c, v) * it->mass;
      continue;
    }
    double h = it->mass / steps_per_segment;
    for (int i = 0; i < steps_per_segment; ++i) {
      double k1 = phi(c, v);
      double k2 = phi(c, v - h / 2 * k1);
      double k3 = phi(c, v - h / 2 * k2);
      double k4 = phi(c, v - h * k3);
      v -= h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }
  return v;
}

TEST(SolveBackward, EmptyInterval) {
  auto env = builtin_scenario("heavy-tail");
  EXPECT_EQ(solve_backward(env, 0.4, 0.4, 5.0).value, 5.0);
}

TEST(SolveBackward, LinearClosedForm) {
  auto env = flow(1.0, 0.0);
  double v = solve_backward(env, 0.0, 1.0, 1.0, kTol).value;
  EXPECT_LT(test::rel_err(v, std::exp(-1.0)), 1e-8);
  EXPECT_NEAR(reference_rk4(env, 0.0, 1.0, 1.0, 1000000), std::exp(-1.0), 1e-12);
}

TEST(SolveBackward, RiccatiClosedForm) {
  auto env = flow(0.0, 1.0);
  EXPECT_LT(test::rel_err(solve_backward(env, 0.0, 1.0, 1.0, kTol).value, 0.5), 1e-8);
  for (double lambda : {0.2, 3.0, 10.0}) {
    double want = lambda / (1.0 + lambda * 0.7);
    EXPECT_LT(test::rel_err(solve_backward(env, 0.1, 0.8, lambda, kTol).value, want), 1e-8);
  }
}

TEST(SolveBackward, SingleAtomStep) {
  EXPECT_DOUBLE_EQ(solve_backward(single_atom(), 0.0, 2.0, 2.0).value, 1.0);
  // The atom at 1 is excluded from (1, 2].
  EXPECT_DOUBLE_EQ(solve_backward(single_atom(), 1.0, 2.0, 2.0).value, 2.0);
}

TEST(SolveBackward, MatchesReferenceIntegrator) {
  for (const auto& name : list_builtin_scenarios()) {
    auto env = builtin_scenario(name);
    for (double lambda : {0.5, 1.5, 4.0}) {
      double v = solve_backward(env, 0.0, 1.0, lambda, kTol).value;
      double ref = reference_rk4(env, 0.0, 1.0, lambda, 20000);
      EXPECT_LT(test::rel_err(v, ref), 1e-8) << name << " " << lambda;
    }
  }
}

TEST(SolveBackward, NegativeCumulantIsAnError) {
  // An atom with delta near one and a large lambda overshoots zero.
  Coefficients x;
  x.b1 = 3.0;
  EnvironmentSpec env(1.0, {}, {{0.5, 1.0, x}});
  EXPECT_THROW(solve_backward(env, 0.0, 1.0, 1.0), NegativeCumulant);
}

TEST(TransitionLaplace, Examples) {
  auto env = flow(0.0, 1.0);
  EXPECT_EQ(transition_laplace(env, 0.0, 0.0, 1.0, 1.0), 1.0);
  EXPECT_EQ(transition_laplace(env, kInf, 0.0, 1.0, 1.0), 0.0);
  EXPECT_NEAR(transition_laplace(env, 1.0, 0.0, 1.0, 1.0), std::exp(-0.5), 1e-9);
}

TEST(SolveGrid, GridInvariants) {
  std::mt19937_64 gen(21);
  std::vector<EnvironmentSpec> envs;
  for (const auto& name : list_builtin_scenarios()) envs.push_back(builtin_scenario(name));
  for (int i = 0; i < 4; ++i) envs.push_back(test::random_environment(gen));
  std::vector<double> lambdas{0.25, 0.5, 1.0, 2.0, 4.0};
  for (const auto& env : envs) {
    double t = env.horizon();
    auto rs = default_r_grid(env, t, 21);
    for (const auto& a : env.atoms()) {
      EXPECT_NE(std::find(rs.begin(), rs.end(), a.time), rs.end());
    }
    auto sol = solve_grid(env, t, rs, lambdas, kTol);
    double c0 = compute_c0(env);
    double gt = env.gamma(t);
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      for (std::size_t i = 0; i < sol.rs.size(); ++i) {
        double v = sol.values[l][i];
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, (lambdas[l] + c0 * gt + 1.0) * std::exp(c0 * gt));
        if (sol.rs[i] == t) ASSERT_EQ(v, lambdas[l]);
        if (l > 0) ASSERT_LE(sol.values[l - 1][i], v + 10 * kTol);
      }
    }
  }
}

TEST(SolveBackward, FlowProperty) {
  std::mt19937_64 gen(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EnvironmentSpec> envs;
  for (const auto& name : list_builtin_scenarios()) envs.push_back(builtin_scenario(name));
  for (int i = 0; i < 4; ++i) envs.push_back(test::random_environment(gen));
  for (const auto& env : envs) {
    for (int n = 0; n < 20; ++n) {
      double p[3] = {u(gen), u(gen), u(gen)};
      std::sort(p, p + 3);
      double lambda = 0.2 + 4.0 * u(gen);
      double inner = solve_backward(env, p[1], p[2], lambda, kTol).value;
      double lhs = solve_backward(env, p[0], p[2], lambda, kTol).value;
      double rhs = solve_backward(env, p[0], p[1], inner, kTol).value;
      ASSERT_LE(std::abs(lhs - rhs), 10 * kTol);
    }
  }
}

TEST(SolveBackward, ErrorEstimateBoundsHalving) {
  for (const auto& name : list_builtin_scenarios()) {
    auto env = builtin_scenario(name);
    auto coarse = solve_backward(env, 0.0, 1.0, 2.0, 1e-7);
    auto fine = solve_backward(env, 0.0, 1.0, 2.0, 1e-12);
    EXPECT_LE(std::abs(coarse.value - fine.value), std::max(coarse.error, 1e-7)) << name;
  }
}

TEST(Envelope, Examples) {
  auto env = flow(1.0, 0.0);
  auto e = envelope_bounds(env, 1.0, 1.0, 1.0);
  EXPECT_NEAR(e.upper, 3.0 * std::exp(1.0), 1e-12);
  EXPECT_NEAR(e.f, (1.0 - std::exp(-e.upper)) / e.upper, 1e-15);
  EXPECT_NEAR(e.h, (1.0 - std::exp(-2.0 * e.upper)) / (2.0 * e.upper), 1e-15);
  EXPECT_NEAR(e.epsilon, std::min(1.0, e.f / e.upper), 1e-15);
  EXPECT_NEAR(e.total_variation, 1.0, 1e-12);
  EXPECT_NEAR(e.lower, std::exp(-1.0) / 2.0, 1e-12);
  for (double r : {0.0, 0.25, 0.5, 1.0}) EXPECT_NEAR(e.alpha(r), -r, 1e-12);
  EXPECT_GE(e.upper, e.lower);
}

TEST(Envelope, LowerBoundHoldsOnScenarios) {
  const double a = 0.5;
  const double b = 2.0;
  for (const auto& name : list_builtin_scenarios()) {
    auto env = builtin_scenario(name);
    auto e = envelope_bounds(env, 1.0, a, b);
    ASSERT_GE(e.upper, e.lower);
    ASSERT_GT(e.lower, 0.0);
    auto rs = default_r_grid(env, 1.0, 11);
    auto sol = solve_grid(env, 1.0, rs, {a, 1.0, b}, kTol);
    for (const auto& row : sol.values) {
      for (double v : row) {
        EXPECT_GE(v, e.lower) << name;
        EXPECT_LE(v, e.upper) << name;
      }
    }
  }
}

}  // namespace
}  // namespace cbve
