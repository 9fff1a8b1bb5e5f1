// SPDX-License-Identifier: Apache-2.0
#include <set>

#include <gtest/gtest.h>

#include "cbve/rng.hpp"
#include "test_support.hpp"

namespace cbve {
namespace {

// Known-answer vectors published with the reference Philox implementation.
TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  EXPECT_EQ(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}),
            (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                 K{0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                 K{0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, Reproducible) {
  RandomStream a(42, 7, 3, 1);
  RandomStream b(42, 7, 3, 1);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, KeysSeparateStreams) {
  std::set<std::uint64_t> first;
  for (std::uint64_t seed : {1u, 2u}) {
    for (std::uint32_t rep : {0u, 1u}) {
      for (std::uint32_t gen : {0u, 1u}) {
        for (std::uint32_t purpose : {0u, 1u}) {
          RandomStream s(seed, rep, gen, purpose);
          first.insert(s.next_u64());
        }
      }
    }
  }
  EXPECT_EQ(first.size(), 16u);
}

TEST(RandomStream, UniformIsOpenAndFlat) {
  RandomStream s(9, 0, 0);
  const int bins = 100;
  const std::int64_t draws = 1'000'000;
  std::vector<std::int64_t> counts(bins, 0);
  for (std::int64_t i = 0; i < draws; ++i) {
    double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    ++counts[static_cast<std::size_t>(u * bins)];
  }
  auto chi = test::chi_square(counts, std::vector<double>(bins, 1.0 / bins), draws);
  EXPECT_GT(chi.p_value, 1e-4) << chi.statistic;
}

}  // namespace
}  // namespace cbve
