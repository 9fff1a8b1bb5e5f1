// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "cbve/environment.hpp"
#include "cbve/error.hpp"
#include "cbve/scenarios.hpp"
#include "test_support.hpp"

namespace cbve {
namespace {

Coefficients coef(double b1, double c = 0.0, JumpKernel m = {}) {
  Coefficients x;
  x.b1 = b1;
  x.c = c;
  x.kernel = std::move(m);
  return x;
}

EnvironmentSpec unit_flow(const Coefficients& c, double horizon = 1.0) {
  return EnvironmentSpec(horizon, {{0.0, horizon, 1.0, c}}, {});
}

//---------------------------------------------------------------------------//
// Admissibility
//---------------------------------------------------------------------------//

TEST(Admissibility, BoundaryAtomWithoutLargeJumps) {
  EnvironmentSpec env(2.0, {}, {{1.0, 0.5, coef(2.0)}});
  EXPECT_DOUBLE_EQ(atom_delta(env.atoms()[0]), 1.0);
  auto report = validate_admissible(env);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].condition, "3'");
  EXPECT_NE(report.violations[0].location.find("atom[0]"), std::string::npos);
}

TEST(Admissibility, DiffusionAtAtom) {
  EnvironmentSpec env(1.0, {{0.0, 1.0, 1.0, coef(0.0, 1.0)}},
                      {{0.5, 0.3, coef(0.0, 1.0)}});
  auto report = validate_admissible(env);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations[0].condition, "1'");
}

TEST(Admissibility, ContinuousEnvironmentIsAdmissible) {
  auto env = unit_flow(coef(1.0, 0.5, JumpKernel::atomic({{2.0, 0.3}})));
  EXPECT_TRUE(validate_admissible(env).ok());
}

TEST(Admissibility, DeltaAboveOne) {
  EnvironmentSpec env(1.0, {}, {{0.5, 1.0, coef(1.5)}});
  auto report = validate_admissible(env);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations[0].condition, "2'");
}

TEST(Admissibility, BoundaryAtomNeedsJumpsBelowEta) {
  auto far = JumpKernel::atomic({{5.0, 0.1}});
  EnvironmentSpec env(1.0, {}, {{0.5, 1.0, coef(1.0, 0.0, far)}});
  EXPECT_FALSE(validate_admissible(env, 2.0).ok());
  EXPECT_TRUE(validate_admissible(env, 6.0).ok());
}

TEST(Admissibility, BuiltinScenariosAreAdmissible) {
  auto names = list_builtin_scenarios();
  for (const char* must : {"feller", "linear-drift", "atom-bottleneck", "heavy-tail", "null"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), must), names.end()) << must;
  }
  for (const auto& name : names) {
    EXPECT_TRUE(validate_admissible(builtin_scenario(name)).ok()) << name;
  }
  EXPECT_DOUBLE_EQ(atom_delta(builtin_scenario("atom-bottleneck").atoms()[0]), 0.5);
}

TEST(Environment, RejectsMalformedInput) {
  EXPECT_THROW(EnvironmentSpec(1.0, {{0.0, 0.6, 1.0, {}}, {0.5, 1.0, 1.0, {}}}, {}),
               InvalidArgument);
  EXPECT_THROW(EnvironmentSpec(1.0, {}, {{0.0, 1.0, {}}}), InvalidArgument);
  EXPECT_THROW(EnvironmentSpec(1.0, {}, {{0.5, -1.0, {}}}), InvalidArgument);
  EXPECT_THROW(EnvironmentSpec(1.0, {{0.0, 2.0, 1.0, {}}}, {}), InvalidArgument);
}

//---------------------------------------------------------------------------//
// Time scale
//---------------------------------------------------------------------------//

TEST(TimeScale, GammaAndInverse) {
  EnvironmentSpec env(2.0, {{0.0, 1.0, 2.0, coef(1.0)}, {1.5, 2.0, 1.0, coef(1.0)}},
                      {{1.2, 0.5, coef(0.5)}});
  EXPECT_DOUBLE_EQ(env.gamma(0.5), 1.0);
  EXPECT_DOUBLE_EQ(env.gamma(1.2), 2.5);
  EXPECT_DOUBLE_EQ(env.gamma_left(1.2), 2.0);
  EXPECT_DOUBLE_EQ(env.gamma(2.0), 3.0);
  EXPECT_DOUBLE_EQ(env.gamma_inverse(1.0), 0.5);
  EXPECT_DOUBLE_EQ(env.gamma_inverse(2.0), 1.0);  // left end of the flat stretch
  EXPECT_DOUBLE_EQ(env.gamma_inverse(2.3), 1.2);
  EXPECT_DOUBLE_EQ(env.gamma_inverse(2.75), 1.75);
  EXPECT_TRUE(std::isinf(env.gamma_inverse(3.5)));
  EXPECT_DOUBLE_EQ(env.measure(1.2, 2.0, Interval::LeftOpen), 0.5);
  EXPECT_DOUBLE_EQ(env.measure(1.2, 2.0, Interval::Closed), 1.0);
  EXPECT_DOUBLE_EQ(env.measure(0.0, 1.2, Interval::Open), 2.0);
  EXPECT_DOUBLE_EQ(env.measure(1.2, 1.2, Interval::LeftOpen), 0.0);
  EXPECT_DOUBLE_EQ(env.measure(1.2, 1.2, Interval::Closed), 0.5);
}

TEST(TimeScale, ScalingConstant) {
  auto env = unit_flow(coef(1.0));
  EXPECT_DOUBLE_EQ(discretize_time(env, 99, 1.0).beta(), 400.0);
}

TEST(TimeScale, FloorArithmetic) {
  auto env = unit_flow(coef(1.0));
  auto clock = discretize_time(env, 99, 1.0);
  EXPECT_EQ(clock(0.01), 4);
  EXPECT_DOUBLE_EQ(clock.inverse(4), 0.01);
  EXPECT_EQ(clock.total(), 400);
}

TEST(TimeScale, AtomScaling) {
  EnvironmentSpec env(2.0, {}, {{1.0, 1.0, coef(0.5)}});
  auto clock = discretize_time(env, 99, 1.0);
  EXPECT_EQ(clock(1.0) - clock.left_limit(1.0), 400);
  auto big = clock.big_jump_times(0.0, 2.0);
  ASSERT_EQ(big.size(), 1u);
  EXPECT_EQ(big[0], 1.0);
  EXPECT_EQ(clock.jump_times(0.0, 2.0), big);
}

TEST(TimeScale, SandwichInequalities) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EnvironmentSpec> envs;
  for (const auto& name : list_builtin_scenarios()) {
    if (name != "null") envs.push_back(builtin_scenario(name));
  }
  for (int i = 0; i < 6; ++i) envs.push_back(test::random_environment(gen));
  for (const auto& env : envs) {
    double c0 = compute_c0(env);
    for (int k : {1, 7, 50, 333}) {
      auto clock = discretize_time(env, k, c0);
      double beta = clock.beta();
      const double slack = kSnapTolerance;
      for (int n = 0; n < 10000; ++n) {
        double t = u(gen) * env.horizon();
        auto gk = clock(t);
        double g = env.gamma(t);
        double inv = clock.inverse(gk);
        ASSERT_LE(inv, t);
        ASSERT_LE(static_cast<double>(gk), beta * env.gamma(inv) + slack);
        ASSERT_LE(env.gamma(inv), g);
        ASSERT_LT(beta * g, static_cast<double>(gk) + 1.0 + slack);
      }
      for (std::int64_t i = 1; i <= clock.total(); ++i) {
        if (!clock.in_s(i)) continue;
        ASSERT_LE(beta * env.gamma_left(clock.inverse(i)), static_cast<double>(i) + slack);
        ASSERT_GE(beta * env.gamma(clock.inverse(i - 1)), static_cast<double>(i - 1) - slack);
      }
    }
  }
}

TEST(TimeScale, SnapsNearMultiples) {
  // 0.1 * 3 is 0.30000000000000004; with beta = 10 the clock must read 3.
  auto env = unit_flow(coef(1.0));
  DiscreteTimeScale clock(env, 10.0);
  EXPECT_EQ(clock(0.1 * 3.0), 3);
  EXPECT_EQ(clock(0.3 - 1e-9), 2);
}

//---------------------------------------------------------------------------//
// Canonical form
//---------------------------------------------------------------------------//

TEST(Canonicalize, DriftOnly) {
  RawTriplet raw{1.0, {{0.0, 1.0, 1.0, 0.0, 0.0, {}}}, {}};
  auto env = canonicalize(raw);
  ASSERT_EQ(env.pieces().size(), 1u);
  EXPECT_EQ(env.pieces()[0].density, 1.0);
  EXPECT_EQ(env.pieces()[0].coef.b1, 1.0);
  EXPECT_EQ(env.pieces()[0].coef.c, 0.0);
  EXPECT_TRUE(env.pieces()[0].coef.kernel.empty() ||
              env.pieces()[0].coef.kernel.mass(0.0) == 0.0);
}

TEST(Canonicalize, DiffusionOnly) {
  RawTriplet raw{1.0, {{0.0, 1.0, 0.0, 2.0, 0.0, {}}}, {}};
  auto env = canonicalize(raw);
  EXPECT_EQ(env.pieces()[0].density, 2.0);
  EXPECT_EQ(env.pieces()[0].coef.c, 1.0);
}

TEST(Canonicalize, AtomDecomposition) {
  RawTriplet raw{2.0, {}, {{1.0, -0.5, 1.0, JumpKernel::atomic({{3.0, 1.0}})}}};
  auto env = canonicalize(raw);
  ASSERT_EQ(env.atoms().size(), 1u);
  const auto& a = env.atoms()[0];
  EXPECT_DOUBLE_EQ(a.mass, 1.5);
  EXPECT_DOUBLE_EQ(a.coef.b1, -1.0 / 3.0);
  ASSERT_EQ(a.coef.kernel.atoms().size(), 1u);
  EXPECT_EQ(a.coef.kernel.atoms()[0].z, 3.0);
  EXPECT_DOUBLE_EQ(a.coef.kernel.atoms()[0].w, 2.0 / 3.0);
}

TEST(Canonicalize, RejectsInconsistentInput) {
  RawTriplet raw{1.0, {{0.0, 1.0, 0.0, -1.0, 0.0, {}}}, {}};
  EXPECT_THROW(canonicalize(raw), InvalidArgument);
}

TEST(Canonicalize, RoundTrip) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    RawTriplet raw;
    raw.horizon = 1.0;
    double t = 0.0;
    for (int i = 0; i < 3; ++i) {
      double end = i == 2 ? 1.0 : t + 0.1 + 0.2 * u(gen);
      JumpKernel k(std::vector<KernelAtom>{{0.5 + 3.0 * u(gen), u(gen)}},
                   PowerLaw{0.3 + u(gen), 0.5 * u(gen), 0.0, 4.0});
      raw.pieces.push_back({t, end, 4.0 * u(gen) - 2.0, u(gen), u(gen), k});
      t = end;
    }
    raw.atoms.push_back({0.25 + 0.5 * u(gen), u(gen) - 0.5, u(gen),
                         JumpKernel::atomic({{0.3 + 2.0 * u(gen), u(gen)}})});
    auto back = reconstruct(canonicalize(raw));
    ASSERT_EQ(back.pieces.size(), raw.pieces.size());
    for (std::size_t i = 0; i < raw.pieces.size(); ++i) {
      const auto& a = raw.pieces[i];
      const auto& b = back.pieces[i];
      EXPECT_EQ(a.start, b.start);
      EXPECT_EQ(a.end, b.end);
      EXPECT_DOUBLE_EQ(a.b1_density, b.b1_density);
      EXPECT_DOUBLE_EQ(a.c_density, b.c_density);
      // m~ as a measure: density times kernel weights.
      EXPECT_DOUBLE_EQ(a.m_density * a.kernel.atoms()[0].w,
                       b.m_density * b.kernel.atoms()[0].w);
      EXPECT_DOUBLE_EQ(a.m_density * a.kernel.density()->scale,
                       b.m_density * b.kernel.density()->scale);
    }
    ASSERT_EQ(back.atoms.size(), 1u);
    EXPECT_DOUBLE_EQ(back.atoms[0].b1_mass, raw.atoms[0].b1_mass);
    EXPECT_DOUBLE_EQ(back.atoms[0].m_mass * back.atoms[0].kernel.atoms()[0].w,
                     raw.atoms[0].m_mass * raw.atoms[0].kernel.atoms()[0].w);
  }
}

//---------------------------------------------------------------------------//
// C0
//---------------------------------------------------------------------------//

TEST(C0, Examples) {
  EXPECT_DOUBLE_EQ(compute_c0(unit_flow(coef(1.0, 0.5, JumpKernel::atomic({{2.0, 0.3}})))),
                   1.8);
  EXPECT_EQ(compute_c0(builtin_scenario("null")), 0.0);
  auto pl = unit_flow(coef(0.0, 0.0, JumpKernel::power_law({0.5, 1.0, 0.0, 1.0})));
  EXPECT_NEAR(compute_c0(pl), 2.0 / 3.0, 1e-15);
}

TEST(C0, SupremumOverPiecesAndAtoms) {
  EnvironmentSpec env(1.0, {{0.0, 0.5, 1.0, coef(-0.5, 0.2)}, {0.5, 1.0, 3.0, coef(0.1)}},
                      {{0.7, 0.2, coef(-1.25)}});
  EXPECT_DOUBLE_EQ(compute_c0(env), 1.25);
}

}  // namespace
}  // namespace cbve
