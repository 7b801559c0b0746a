// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "loopbench/random.hpp"

using namespace loopbench;

TEST(RandomStream, SameKeySameDraws) {
  RandomStream a = derive_stream(12345, 3, 7);
  RandomStream b = derive_stream(12345, 3, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, EveryKeyComponentMatters) {
  const auto first = [](std::uint64_t s, std::uint64_t v, std::uint64_t t) { return derive_stream(s, v, t).next_u64(); };
  EXPECT_NE(first(1, 0, 0), first(2, 0, 0));
  EXPECT_NE(first(1, 0, 0), first(1, 1, 0));
  EXPECT_NE(first(1, 0, 0), first(1, 0, 1));
  // Swapping node and round must not alias.
  EXPECT_NE(first(1, 2, 3), first(1, 3, 2));
}

TEST(RandomStream, NeighboringNodesDoNotCollide) {
  std::size_t collisions = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    collisions += derive_stream(seed, 0, 4).next_u64() == derive_stream(seed, 1, 4).next_u64();
  }
  // Expected collisions for 64-bit draws is ~1000 / 2^64.
  EXPECT_EQ(collisions, 0u);
}

TEST(RandomStream, FirstDrawIsUniformKolmogorovSmirnov) {
  std::vector<double> draws;
  draws.reserve(10'000);
  for (std::uint64_t key = 0; key < 10'000; ++key) draws.push_back(derive_stream(7, key % 100, key / 100).next_unit());
  std::sort(draws.begin(), draws.end());
  double d = 0.0;
  const double n = static_cast<double>(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - draws[i], draws[i] - static_cast<double>(i) / n});
  }
  EXPECT_LT(d, 0.02);
}

TEST(RandomStream, NextBelowStaysInRangeAndCoversIt) {
  RandomStream s(1, 2, 3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = s.next_below(7);
    ASSERT_LT(x, 7u);
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_EQ(RandomStream(0, 0, 0).next_below(1), 0u);
}

TEST(RandomStream, UnitDrawsInHalfOpenInterval) {
  RandomStream s(9, 9, 9);
  for (int i = 0; i < 10'000; ++i) {
    const double u = s.next_unit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(DeriveSeed, DistinctForDistinctIndices) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_seed(5, i));
  EXPECT_EQ(seeds.size(), 1000u);
  EXPECT_EQ(derive_seed(5, 3), derive_seed(5, 3));
  EXPECT_NE(derive_seed(5, 3), derive_seed(6, 3));
}
