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

#include "bfnlab/corpus.hpp"
#include "bfnlab/deviation.hpp"
#include "test_util.hpp"

namespace bfnlab {
namespace {

TEST(FdConstruct, SmallCases) {
    SubsetPoly f1 = fd_construct({1, 4});
    EXPECT_EQ(f1.size(), 4u);
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(f1.coeff(Mask{1} << i), 1.0);
    }
    SubsetPoly f2 = fd_construct({2, 3});
    SubsetPoly expected(3);
    for (Mask s : {0b001, 0b010, 0b100}) {
        expected.set(s, 1.0);
    }
    for (Mask s : {0b011, 0b101, 0b110}) {
        expected.set(s, -1.0);
    }
    EXPECT_EQ(f2, expected);
    EXPECT_THROW(fd_construct({0, 3}), std::invalid_argument);
    EXPECT_THROW(fd_construct({8, 63}), BudgetExceeded);
}

TEST(FdConstruct, ValueDependsOnlyOnLiveCount) {
    for (int n = 1; n <= 10; ++n) {
        for (int d = 1; d <= 4; ++d) {
            SubsetPoly f = fd_construct({d, n});
            for (Mask x = 0; x < (Mask{1} << n); ++x) {
                EXPECT_EQ(testing::brute_eval_y(f, x), static_cast<double>(fd_value(d, popcount(x))));
            }
        }
    }
}

TEST(FdValue, ClosedForm) {
    EXPECT_EQ(fd_value(3, 0), 0);
    EXPECT_EQ(fd_value(3, 2), 1);
    EXPECT_EQ(fd_value(3, 4), 2);
    EXPECT_EQ(fd_value(2, 3), 0);
    for (int d = 1; d <= 8; ++d) {
        EXPECT_EQ(fd_value(d, 0), 0);
        for (int m = 1; m <= d; ++m) {
            EXPECT_EQ(fd_value(d, m), 1) << d << " " << m;
        }
        EXPECT_EQ(fd_value(d, d + 1), d % 2 == 0 ? 0 : 2);
    }
    // the sum sum_{e=1}^{d} (-1)^{e-1} C(m, e), directly
    for (int d = 1; d <= 8; ++d) {
        for (int m = 0; m <= 30; ++m) {
            double direct = 0;
            for (int e = 1; e <= d; ++e) {
                direct += (e % 2 ? 1.0 : -1.0) * testing::binom_coef(m, e);
            }
            EXPECT_EQ(static_cast<double>(fd_value(d, m)), direct);
        }
    }
    EXPECT_THROW(fd_value(1, -1), std::invalid_argument);
}

TEST(MomentCheck, SingleEdge) {
    const double p = 0.3;
    for (int d = 1; d <= 4; ++d) {
        Hypergraph h(6, {full_mask(d)});
        for (int k = 1; k <= 4; ++k) {
            MomentReport r = moment_check(h, BiasedMeasure(p), k);
            EXPECT_NEAR(r.moment, std::pow(p, d), 1e-15);
            EXPECT_TRUE(r.holds);
            EXPECT_EQ(r.d, d);
            EXPECT_DOUBLE_EQ(r.c, p);
            EXPECT_DOUBLE_EQ(r.c_eff, 1.0);
        }
    }
}

TEST(MomentCheck, SingletonsAreBinomial) {
    const int k = 10;
    const double p = 0.08;
    std::vector<Mask> edges;
    for (int i = 0; i < k; ++i) {
        edges.push_back(Mask{1} << i);
    }
    Hypergraph h(k, edges);
    for (int order = 1; order <= 4; ++order) {
        double direct = 0;
        for (int m = 0; m <= k; ++m) {
            direct += std::pow(m, order) * testing::binom_pmf(k, p, m);
        }
        MomentReport r = moment_check(h, BiasedMeasure(p), order);
        EXPECT_NEAR(r.moment, direct, 1e-13);
        EXPECT_TRUE(r.uniform);
        EXPECT_DOUBLE_EQ(r.bf, k);
        EXPECT_NEAR(r.bound, std::pow(std::max(1.0, k * p) * order, order), 1e-9);
        EXPECT_TRUE(r.holds);
    }
    EXPECT_THROW(moment_check(h, BiasedMeasure(p), 0), std::invalid_argument);
}

TEST(MomentCheck, RandomBoundedHypergraphs) {
    Rng rng(1);
    for (int rep = 0; rep < 50; ++rep) {
        const double p = 0.05 + 0.1 * uniform01(rng);
        Hypergraph h = random_bf_hypergraph(16, 1, 3, 1.0 / p, 20, rng);
        for (int k = 1; k <= 4; ++k) {
            MomentReport r = moment_check(h, BiasedMeasure(p), k);
            EXPECT_TRUE(r.holds) << rep << " " << k;
            EXPECT_LE(r.c, 1.0 + 1e-12);
        }
    }
}

TEST(TailEstimate, BinomialTails) {
    const int k = 20;
    const double p = 0.1;
    std::vector<Mask> edges;
    for (int i = 0; i < k; ++i) {
        edges.push_back(Mask{1} << i);
    }
    Hypergraph h(k, edges);
    auto pts = tail_estimate(h, BiasedMeasure(p), {5.0, 21.0});
    double oracle = 0;
    for (int m = 5; m <= k; ++m) {
        oracle += testing::binom_pmf(k, p, m);
    }
    EXPECT_NEAR(pts[0].tail, oracle, 1e-14);
    EXPECT_TRUE(pts[0].exact);
    EXPECT_EQ(pts[1].tail, 0.0);

    auto mc = tail_estimate(h, BiasedMeasure(p), {5.0}, EvalMode::monte_carlo(50000, 2));
    EXPECT_FALSE(mc[0].exact);
    EXPECT_LE(mc[0].lo, mc[0].tail);
    EXPECT_GE(mc[0].hi, mc[0].tail);
    EXPECT_LE(mc[0].lo, oracle);
    EXPECT_GE(mc[0].hi, oracle);
}

TEST(TailEstimate, FdTailsDecrease) {
    for (int d = 1; d <= 3; ++d) {
        SubsetPoly f = fd_construct({d, 16});
        auto pts = tail_estimate(f, BiasedMeasure(0.1), default_t_grid());
        ASSERT_EQ(pts.size(), 5u);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            EXPECT_LE(pts[i].tail, pts[i - 1].tail);
        }
        double direct = testing::brute_expect(16, 0.1, [&](Mask x) {
            return std::abs(static_cast<double>(fd_value(d, popcount(x)))) >= 2 ? 1.0 : 0.0;
        });
        EXPECT_NEAR(pts[1].tail, direct, 1e-12);
    }
}

TEST(BiasProfile, Examples) {
    const ValueSet a{0.0, 1.0};
    BiasProfile c = bias_profile(TruthTable::constant(4, 1.0), a, BiasedMeasure(0.2));
    EXPECT_EQ(c.a_star, 1.0);
    EXPECT_NEAR(c.pr_ne, 0.0, 1e-15);

    for (int k : {3, 9}) {
        const double p = 0.05;
        SubsetPoly sum(k);
        for (int i = 0; i < k; ++i) {
            sum.set(Mask{1} << i, 1.0);
        }
        BiasProfile b = bias_profile(sum, a, BiasedMeasure(p));
        EXPECT_EQ(b.a_star, 0.0);
        EXPECT_NEAR(b.pr_ne, 1 - std::pow(1 - p, k), 1e-14);
        for (int m = 0; m <= k; ++m) {
            EXPECT_NEAR(b.histogram[static_cast<double>(m)], testing::binom_pmf(k, p, m), 1e-14);
        }
    }
}

TEST(BiasProfile, FdOffBinaryMassMatchesBinomialReference) {
    const int n = 20;
    const double delta = 0.2;
    const double p = delta / n;
    for (int d = 1; d <= 3; ++d) {
        BiasProfile b = bias_profile(fd_construct({d, n}), ValueSet{0.0, 1.0}, BiasedMeasure(p));
        double off = 0;
        for (const auto &[v, pr] : b.histogram) {
            if (v != 0.0 && v != 1.0) {
                off += pr;
            }
        }
        double exact = fd_off_binary_prob(d, n, p);
        EXPECT_NEAR(off, exact, 1e-13);
        // the Poisson approximation is only a reference; its quality is loose
        const int first = d % 2 ? d + 1 : d + 2;
        double poisson = std::exp(-delta) * std::pow(delta, first) / std::tgamma(first + 1.0);
        EXPECT_NEAR(exact / poisson, 1.0, 0.3);
    }
}

TEST(LogLogSlope, PowerLaw) {
    std::vector<double> x{0.05, 0.1, 0.2, 0.3}, y;
    for (double v : x) {
        y.push_back(3 * std::pow(v, 2.5));
    }
    EXPECT_NEAR(loglog_slope(x, y), 2.5, 1e-12);
    EXPECT_THROW(loglog_slope({1.0}, {1.0}), std::invalid_argument);
    EXPECT_THROW(loglog_slope({1.0, 2.0}, {0.0, 1.0}), std::invalid_argument);
}

}  // namespace
}  // namespace bfnlab
