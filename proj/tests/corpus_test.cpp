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

#include "bfnlab/corpus.hpp"
#include "test_util.hpp"

namespace bfnlab {
namespace {

TEST(Corpus, SameSeedSameInstance) {
    const ValueSet a{0.0, 1.0};
    Rng r1 = stream_rng(11, 3), r2 = stream_rng(11, 3);
    PlantedInstance x = planted_sparse_junta(10, 0.1, 2, a, 0.001, 0.01, r1);
    PlantedInstance y = planted_sparse_junta(10, 0.1, 2, a, 0.001, 0.01, r2);
    EXPECT_EQ(x.truth, y.truth);
    EXPECT_EQ(x.noise, y.noise);
    EXPECT_EQ(x.f, y.f);
}

TEST(Corpus, CatalogJuntaIsValuedAndSmall) {
    const ValueSet a{-1.0, 0.0, 1.0};
    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        SubsetPoly g = random_catalog_junta(12, 3, 2, a, rng);
        EXPECT_LE(g.degree(), 2);
        EXPECT_GE(popcount(g.variables()), 1);
        EXPECT_LE(popcount(g.variables()), 3);
        EXPECT_TRUE(is_valued_in(to_truth_table(g), a));
    }
}

TEST(Corpus, PerturbedJuntaWithoutNoiseIsItsTruth) {
    Rng rng(2);
    PlantedInstance inst = perturbed_junta(8, 3, 1, ValueSet{0.0, 1.0}, 0.0, rng);
    EXPECT_EQ(y_expand(inst.f), inst.truth);
    EXPECT_EQ(inst.noise_norm2, 0.0);
}

TEST(Corpus, PerturbationHasRequestedMass) {
    Rng rng(4);
    PlantedInstance inst = perturbed_junta(8, 3, 2, ValueSet{0.0, 1.0}, 0.01, rng);
    const BiasedMeasure half(0.5);
    double direct = sq_distance(inst.f, to_truth_table(inst.truth), half);
    EXPECT_NEAR(direct, 0.01, 1e-12);
    EXPECT_NEAR(inst.noise_norm2, 0.01, 1e-12);
}

TEST(Corpus, PlantedNoiseInRange) {
    Rng rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        PlantedInstance inst = planted_sparse_junta(10, 0.1, 1, ValueSet{0.0, 1.0}, 0.002, 0.004, rng);
        EXPECT_GE(inst.noise_norm2, 0.002 - 1e-12);
        EXPECT_LE(inst.noise_norm2, 0.004 + 1e-12);
        EXPECT_NEAR(sq_distance(inst.f, to_truth_table(inst.truth), BiasedMeasure(0.1)), inst.noise_norm2, 1e-12);
    }
}

TEST(Corpus, BoundedBranchingHypergraphs) {
    Rng rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        Hypergraph h = random_bf_hypergraph(14, 1, 3, 5.0, 25, rng);
        EXPECT_LE(branching_factor(h), 5.0 + 1e-12);
        for (Mask e : h.edges()) {
            EXPECT_GE(popcount(e), 1);
            EXPECT_LE(popcount(e), 3);
        }
    }
    EXPECT_THROW(random_bf_hypergraph(4, 2, 5, 2.0, 3, rng), std::invalid_argument);
}

}  // namespace
}  // namespace bfnlab
