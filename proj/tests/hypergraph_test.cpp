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

#include <cmath>

#include "bfnlab/hypergraph.hpp"
#include "test_util.hpp"

namespace bfnlab {
namespace {

Hypergraph graph(int n, std::initializer_list<std::initializer_list<int>> edges) {
    std::vector<Mask> out;
    for (const auto &e : edges) {
        out.push_back(IndexSubset::from_indices(e).bits());
    }
    return Hypergraph(n, out);
}

// max over every A ⊆ [n] and k >= 1 of count^{1/k}
double brute_bf(const Hypergraph &h) {
    double rho = 1;
    for (Mask a = 0; a < (Mask{1} << h.n()); ++a) {
        for (int k = 1; k <= h.n(); ++k) {
            int count = 0;
            for (Mask e : h.edges()) {
                if ((a & ~e) == 0 && popcount(e) == popcount(a) + k) {
                    ++count;
                }
            }
            if (count > 0) {
                rho = std::max(rho, std::pow(count, 1.0 / k));
            }
        }
    }
    return rho;
}

TEST(Hypergraph, CanonicalEdges) {
    Hypergraph h = graph(4, {{1, 2}, {0}, {2, 1}});
    EXPECT_EQ(h.size(), 2u);
    EXPECT_EQ(h.vertices(), Mask{0b111});
    EXPECT_EQ(h.max_edge_size(), 2);
    EXPECT_FALSE(h.is_uniform());
    EXPECT_THROW(Hypergraph(3, {Mask{0b1000}}), std::invalid_argument);
}

TEST(BranchingFactor, Star) {
    Hypergraph star = graph(8, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6}, {0, 7}});
    EXPECT_DOUBLE_EQ(branching_factor(star), 7.0);
    EXPECT_DOUBLE_EQ(brute_bf(star), 7.0);
    EXPECT_TRUE(has_branching_factor(star, 7));
    EXPECT_FALSE(has_branching_factor(star, 6.9));
}

TEST(BranchingFactor, TrivialCases) {
    EXPECT_DOUBLE_EQ(branching_factor(Hypergraph(5, {})), 1.0);
    EXPECT_DOUBLE_EQ(branching_factor(Hypergraph(5, {Mask{0}})), 1.0);
    EXPECT_DOUBLE_EQ(branching_factor(graph(5, {{0, 2, 4}})), 1.0);
    EXPECT_FALSE(has_branching_factor(Hypergraph(2, {}), 0.5));
}

TEST(BranchingFactor, CompleteGraphs) {
    for (int m = 2; m <= 8; ++m) {
        std::vector<Mask> edges;
        for_each_combination(m, 2, [&](Mask e) { edges.push_back(e); });
        Hypergraph h(m, edges);
        double expected = std::max(m - 1.0, std::sqrt(m * (m - 1) / 2.0));
        EXPECT_NEAR(branching_factor(h), expected, 1e-12) << m;
        EXPECT_NEAR(brute_bf(h), expected, 1e-12) << m;
    }
}

TEST(BranchingFactor, RandomAgainstBruteForce) {
    Rng rng(1);
    for (int rep = 0; rep < 60; ++rep) {
        Hypergraph h = testing::random_hypergraph(7, 4, 1 + rep % 12, rng);
        EXPECT_NEAR(branching_factor(h), brute_bf(h), 1e-12);
    }
}

TEST(BranchingFactor, EdgeSizeCap) {
    Hypergraph big(30, {full_mask(25)});
    EXPECT_THROW(branching_factor(big), CapExceeded);
}

TEST(RestrictEmpty, Examples) {
    Hypergraph h = graph(4, {{1, 2}, {1, 3}});
    Hypergraph r = restrict_empty(h, IndexSubset::from_indices({1}));
    EXPECT_EQ(r, graph(4, {{2}, {3}}));
    EXPECT_LE(branching_factor(r), 2 * branching_factor(h));
    EXPECT_EQ(restrict_empty(h, IndexSubset()), h);
    EXPECT_EQ(restrict_empty(graph(4, {{1}, {1, 2}}), IndexSubset::from_indices({1})), graph(4, {{}, {2}}));
}

TEST(RestrictEmpty, BranchingFactorAtMostDoubles) {
    Rng rng(2);
    for (int rep = 0; rep < 200; ++rep) {
        Hypergraph h = testing::random_hypergraph(10, 3, 3 + rep % 20, rng);
        const double bf = branching_factor(h);
        for (int i = 0; i < 10; ++i) {
            EXPECT_LE(branching_factor(restrict_empty(h, IndexSubset(Mask{1} << i))), 2 * bf * (1 + 1e-12));
        }
    }
}

TEST(SupportProduct, Examples) {
    Hypergraph one = graph(3, {{1}});
    EXPECT_EQ(support_product(one, one), one);
    EXPECT_EQ(support_product(graph(3, {{1}}), graph(3, {{2}})), graph(3, {{1, 2}}));
}

TEST(SupportProduct, ContainsProductSupport) {
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        SubsetPoly a = testing::random_poly(6, 2, rng, 0.2);
        SubsetPoly b = testing::random_poly(6, 2, rng, 0.2);
        Hypergraph prod = support_product(support(a), support(b));
        const SubsetPoly ab = multiply(a, b);
        for (const auto &[key, c] : ab.coeffs()) {
            EXPECT_NE(std::find(prod.edges().begin(), prod.edges().end(), key), prod.edges().end());
        }
        EXPECT_TRUE(std::isfinite(branching_factor(prod)));
    }
}

TEST(UniquenessProb, Examples) {
    const BiasedMeasure mu(0.3);
    EXPECT_NEAR(uniqueness_prob(graph(3, {{1}}), IndexSubset::from_indices({1}), mu).value, 0.3, 1e-15);
    EXPECT_NEAR(uniqueness_prob(graph(3, {{1}, {2}}), IndexSubset::from_indices({1}), mu).value, 0.3 * 0.7,
                1e-15);
}

TEST(UniquenessProb, ExactMatchesEnumerationAndMonteCarlo) {
    Rng rng(4);
    for (int rep = 0; rep < 30; ++rep) {
        Hypergraph h = testing::random_hypergraph(8, 3, 2 + rep % 8, rng);
        IndexSubset b = sample_mu_p(8, BiasedMeasure(0.3), rng);
        const double p = 0.2;
        double direct = testing::brute_expect(8, p, [&](Mask y) {
            if (!b.subset_of(IndexSubset(y))) {
                return 0.0;
            }
            for (Mask e : h.edges()) {
                if (!is_subset(e, b.bits()) && is_subset(e, y)) {
                    return 0.0;
                }
            }
            return 1.0;
        });
        Estimate exact = uniqueness_prob(h, b, BiasedMeasure(p));
        EXPECT_NEAR(exact.value, direct, 1e-12);
        EXPECT_GE(exact.value, uniqueness_lower_bound(h, b, BiasedMeasure(p)) - 1e-15);
        Estimate mc = uniqueness_prob(h, b, BiasedMeasure(p), EvalMode::monte_carlo(20000, rep));
        EXPECT_FALSE(mc.exact);
        EXPECT_LE(std::abs(mc.value - exact.value), 3 * std::max(mc.std_error, 1e-3));
    }
}

TEST(LiveCount, Examples) {
    const BiasedMeasure mu(0.2);
    CountDistribution empty = live_count_distribution(Hypergraph(4, {}), mu);
    EXPECT_NEAR(empty.pmf[0], 1.0, 1e-15);
    CountDistribution one = live_count_distribution(graph(4, {{1}}), mu);
    EXPECT_NEAR(one.pmf[1], 0.2, 1e-15);
    EXPECT_EQ(live_edge_count(graph(4, {{1}, {1, 2}, {3}}), IndexSubset::from_indices({1, 2})), 2);
}

TEST(LiveCount, DisjointSingletonsAreBinomial) {
    const int k = 9;
    const double p = 0.15;
    std::vector<Mask> edges;
    for (int i = 0; i < k; ++i) {
        edges.push_back(Mask{1} << (2 * i));
    }
    CountDistribution d = live_count_distribution(Hypergraph(2 * k, edges), BiasedMeasure(p));
    ASSERT_EQ(d.pmf.size(), static_cast<std::size_t>(k + 1));
    for (int m = 0; m <= k; ++m) {
        EXPECT_NEAR(d.pmf[m], testing::binom_pmf(k, p, m), 1e-14);
    }
    EXPECT_NEAR(d.moment(1), k * p, 1e-13);
    EXPECT_NEAR(d.moment(2), k * p * (1 - p) + k * k * p * p, 1e-13);
}

TEST(LiveCount, MomentsMatchDirectEnumeration) {
    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        Hypergraph h = testing::random_hypergraph(9, 3, 10, rng);
        CountDistribution d = live_count_distribution(h, BiasedMeasure(0.3));
        for (int k = 1; k <= 4; ++k) {
            double direct = testing::brute_expect(9, 0.3, [&](Mask s) {
                return std::pow(live_edge_count(h, IndexSubset(s)), k);
            });
            EXPECT_NEAR(d.moment(k), direct, 1e-10 * std::max(1.0, direct));
        }
        CountDistribution mc = live_count_distribution(h, BiasedMeasure(0.3), EvalMode::monte_carlo(20000, 1));
        EXPECT_FALSE(mc.exact);
        double se = std::sqrt((d.moment(2) - d.moment(1) * d.moment(1)) / 20000);
        EXPECT_LE(std::abs(mc.moment(1) - d.moment(1)), 4 * se + 1e-12);
    }
}

}  // namespace
}  // namespace bfnlab
