/*
 * Copyright (C) 2026 The lapd-sampler Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lapd/random.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <set>

namespace lapd {
namespace {

using Block = Philox4x32::Block;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
// Counter words are (index lo, index hi, stream lo, stream hi); key words
// are (key lo, key hi).
TEST(Philox, ZeroCounterZeroKey) {
  const Philox4x32 gen(0, 0);
  EXPECT_EQ(gen.block_at(0), (Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, AllOnes) {
  const Philox4x32 gen(~std::uint64_t{0}, ~std::uint64_t{0});
  EXPECT_EQ(gen.block_at(~std::uint64_t{0}),
            (Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, PiDigits) {
  const Philox4x32 gen(0x299f31d0a4093822ull, 0x0370734413198a2eull);
  EXPECT_EQ(gen.block_at(0x85a308d3243f6a88ull),
            (Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, NextBlockWalksTheCounter) {
  Philox4x32 gen(42, 7);
  for (std::uint64_t i = 0; i < 5; ++i) EXPECT_EQ(gen.next_block(), gen.block_at(i));
  EXPECT_EQ(gen.position(), 5u);
  EXPECT_EQ(gen.stream_id(), 7u);
}

TEST(RandomStream, SameSeedAndIdGiveSameSequence) {
  RandomStream a(123, 9);
  RandomStream b(123, 9);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.normal(), b.normal());
    ASSERT_EQ(a.uniform(), b.uniform());
  }
}

TEST(RandomStream, DistinctStreamsDiffer) {
  std::set<double> first_draws;
  for (std::uint64_t id = 0; id < 100; ++id) first_draws.insert(RandomStream(5, id).uniform());
  first_draws.insert(RandomStream(6, 0).uniform());
  EXPECT_EQ(first_draws.size(), 101u);
}

TEST(RandomStream, UniformRange) {
  RandomStream rng(1, 1);
  double lo = 1.0;
  double hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1.0 - 1e-3);
}

TEST(RandomStream, NormalMoments) {
  RandomStream rng(2024, 3);
  const int n = 1000000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  EXPECT_LT(std::abs(mean), 5.0 / std::sqrt(n));
  EXPECT_LT(std::abs(var - 1.0), 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 0.05);
}

TEST(Mix64, SpreadsAdjacentSeeds) {
  EXPECT_NE(mix64(0), 0u);
  EXPECT_NE(mix64(1), mix64(2));
  EXPECT_GT(std::popcount(mix64(1) ^ mix64(2)), 16);
}

}  // namespace
}  // namespace lapd
