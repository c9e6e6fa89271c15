// Copyright 2026 The bfnlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "bfnlab/bits.hpp"
#include "bfnlab/parallel.hpp"
#include "bfnlab/rng.hpp"

namespace bfnlab {
namespace {

TEST(Bits, DepositExtractRoundTrip) {
    const Mask support = 0b1011010;
    for (Mask local = 0; local < 16; ++local) {
        Mask global = deposit(local, support);
        EXPECT_TRUE(is_subset(global, support));
        EXPECT_EQ(extract(global, support), local);
    }
    EXPECT_EQ(deposit(0b101, 0b111000), Mask{0b101000});
}

TEST(Bits, SubsetEnumerationIsAscendingAndComplete) {
    const Mask m = 0b110101;
    std::vector<Mask> seen;
    for_each_subset(m, [&](Mask s) { seen.push_back(s); });
    ASSERT_EQ(seen.size(), 16u);
    EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
    for (Mask s : seen) {
        EXPECT_TRUE(is_subset(s, m));
    }
    std::vector<Mask> only_empty;
    for_each_subset(0, [&](Mask s) { only_empty.push_back(s); });
    EXPECT_EQ(only_empty, std::vector<Mask>{0});
}

TEST(Bits, CombinationsCountAndOrder) {
    std::vector<Mask> seen;
    for_each_combination(6, 3, [&](Mask s) { seen.push_back(s); });
    EXPECT_EQ(seen.size(), 20u);
    EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
    for (Mask s : seen) {
        EXPECT_EQ(popcount(s), 3);
    }
    int empty = 0;
    for_each_combination(4, 0, [&](Mask s) {
        EXPECT_EQ(s, 0u);
        ++empty;
    });
    EXPECT_EQ(empty, 1);
    int none = 0;
    for_each_combination(3, 4, [&](Mask) { ++none; });
    EXPECT_EQ(none, 0);
}

TEST(Bits, IndexSubsetOperations) {
    auto a = IndexSubset::from_indices({4, 1, 1, 7});
    EXPECT_EQ(a.indices(), (std::vector<int>{1, 4, 7}));
    EXPECT_EQ(a.size(), 3);
    EXPECT_TRUE(a.contains(4));
    EXPECT_FALSE(a.contains(0));
    EXPECT_TRUE(a.within(8));
    EXPECT_FALSE(a.within(7));
    auto b = IndexSubset::from_indices({1, 2});
    EXPECT_EQ((a | b).indices(), (std::vector<int>{1, 2, 4, 7}));
    EXPECT_EQ((a & b).indices(), (std::vector<int>{1}));
    EXPECT_EQ((a - b).indices(), (std::vector<int>{4, 7}));
    EXPECT_TRUE((a & b).subset_of(a));
    EXPECT_THROW(IndexSubset::from_indices({63}), std::invalid_argument);
    EXPECT_THROW(IndexSubset::from_indices({-1}), std::invalid_argument);
}

TEST(Rng, StreamsAreDeterministicAndDistinct) {
    Rng a = stream_rng(42, 3);
    Rng b = stream_rng(42, 3);
    Rng c = stream_rng(42, 4);
    auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
}

TEST(Parallel, ResultsIndependentOfWorkerCount) {
    std::vector<std::uint64_t> one(257), four(257);
    parallel_for(one.size(), 1, [&](std::size_t i) { one[i] = stream_rng(9, i)(); });
    parallel_for(four.size(), 4, [&](std::size_t i) { four[i] = stream_rng(9, i)(); });
    EXPECT_EQ(one, four);
}

TEST(Parallel, PropagatesExceptions) {
    EXPECT_THROW(parallel_for(10, 3,
                              [](std::size_t i) {
                                  if (i == 7) {
                                      throw CapExceeded("boom");
                                  }
                              }),
                 CapExceeded);
}

}  // namespace
}  // namespace bfnlab
