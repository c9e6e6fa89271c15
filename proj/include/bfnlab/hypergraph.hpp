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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bfnlab/cube.hpp"

namespace bfnlab {

/// Largest edge size accepted by the branching-factor search (2^|e| subsets
/// are visited per edge).
inline constexpr int kMaxEdgeSize = 24;

/// A finite family of distinct subsets of [n], stored in ascending mask order.
class Hypergraph {
   public:
    Hypergraph() = default;
    Hypergraph(int n, std::vector<Mask> edges) : n_(n), edges_(std::move(edges)) {
        if (n < 0 || n > kMaxVars) {
            throw std::invalid_argument("hypergraph ground set out of range: " + std::to_string(n));
        }
        for (Mask e : edges_) {
            if (!is_subset(e, full_mask(n))) {
                throw std::invalid_argument("hyperedge outside ground set");
            }
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    }

    int n() const {
        return n_;
    }
    const std::vector<Mask> &edges() const {
        return edges_;
    }
    std::size_t size() const {
        return edges_.size();
    }
    bool empty() const {
        return edges_.empty();
    }
    Mask vertices() const {
        Mask v = 0;
        for (Mask e : edges_) {
            v |= e;
        }
        return v;
    }
    int max_edge_size() const {
        int d = 0;
        for (Mask e : edges_) {
            d = std::max(d, popcount(e));
        }
        return d;
    }
    bool is_uniform() const {
        for (Mask e : edges_) {
            if (popcount(e) != popcount(edges_.front())) {
                return false;
            }
        }
        return true;
    }

    friend bool operator==(const Hypergraph &, const Hypergraph &) = default;

   private:
    int n_ = 0;
    std::vector<Mask> edges_;
};

/// The hypergraph H_f of monomials carrying a nonzero coefficient.
inline Hypergraph support(const SubsetPoly &poly) {
    std::vector<Mask> edges;
    edges.reserve(poly.size());
    for (const auto &[key, c] : poly.coeffs()) {
        edges.push_back(key);
    }
    return Hypergraph(poly.n(), std::move(edges));
}

namespace detail {

/// counts[A][k] = |{e in H : A ⊆ e, |e| = |A| + k}| for every A that is a
/// subset of some edge.
inline std::unordered_map<Mask, std::vector<std::uint32_t>> containment_counts(const Hypergraph &h) {
    std::unordered_map<Mask, std::vector<std::uint32_t>> counts;
    for (Mask e : h.edges()) {
        const int size = popcount(e);
        if (size > kMaxEdgeSize) {
            throw CapExceeded("hyperedge of size " + std::to_string(size) + " exceeds the branching-factor cap");
        }
        for_each_subset(e, [&](Mask a) {
            auto &row = counts[a];
            std::size_t k = static_cast<std::size_t>(size - popcount(a));
            if (row.size() <= k) {
                row.resize(k + 1, 0);
            }
            ++row[k];
        });
    }
    return counts;
}

}  // namespace detail

/// Smallest rho >= 1 with |{e : A ⊆ e, |e| = |A|+k}| <= rho^k for all A and k >= 1.
inline double branching_factor(const Hypergraph &h) {
    double rho = 1.0;
    for (const auto &[a, row] : detail::containment_counts(h)) {
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (row[k] > 1) {
                rho = std::max(rho, std::pow(static_cast<double>(row[k]), 1.0 / static_cast<double>(k)));
            }
        }
    }
    return rho;
}

/// Whether every containment count is at most rho^k.
inline bool has_branching_factor(const Hypergraph &h, double rho) {
    if (rho < 1) {
        return false;
    }
    for (const auto &[a, row] : detail::containment_counts(h)) {
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (static_cast<double>(row[k]) > std::pow(rho, static_cast<double>(k)) * (1 + 1e-12)) {
                return false;
            }
        }
    }
    return true;
}

/// H|_{A=∅} = {e \ A : e in H}.
inline Hypergraph restrict_empty(const Hypergraph &h, IndexSubset a) {
    if (!a.within(h.n())) {
        throw std::invalid_argument("restriction set outside ground set");
    }
    std::vector<Mask> edges;
    edges.reserve(h.size());
    for (Mask e : h.edges()) {
        edges.push_back(e & ~a.bits());
    }
    return Hypergraph(h.n(), std::move(edges));
}

/// {e1 ∪ e2}: contains the support of the product of polynomials supported on H1, H2.
inline Hypergraph support_product(const Hypergraph &h1, const Hypergraph &h2) {
    if (h1.n() != h2.n()) {
        throw std::invalid_argument("support_product needs a common ground set");
    }
    std::vector<Mask> edges;
    edges.reserve(h1.size() * h2.size());
    for (Mask a : h1.edges()) {
        for (Mask b : h2.edges()) {
            edges.push_back(a | b);
        }
    }
    return Hypergraph(h1.n(), std::move(edges));
}

/// Number of edges contained in S.
inline int live_edge_count(const Hypergraph &h, IndexSubset s) {
    int count = 0;
    for (Mask e : h.edges()) {
        if (is_subset(e, s.bits())) {
            ++count;
        }
    }
    return count;
}

/// Exact enumeration, or Monte Carlo with a fixed budget.
struct EvalMode {
    std::optional<MonteCarloBudget> mc;

    static EvalMode exact() {
        return {};
    }
    static EvalMode monte_carlo(std::uint64_t samples, std::uint64_t seed) {
        return {MonteCarloBudget{samples, seed}};
    }
    bool is_exact() const {
        return !mc.has_value();
    }
};

/// Law of an integer-valued count X.
struct CountDistribution {
    std::vector<double> pmf;  // pmf[x] = Pr[X = x]
    bool exact = true;
    std::uint64_t samples = 0;

    double moment(int k) const {
        double total = 0;
        for (std::size_t x = 0; x < pmf.size(); ++x) {
            total += pmf[x] * std::pow(static_cast<double>(x), k);
        }
        return total;
    }
    /// Pr[X >= t].
    double tail(double t) const {
        double total = 0;
        for (std::size_t x = 0; x < pmf.size(); ++x) {
            if (static_cast<double>(x) >= t) {
                total += pmf[x];
            }
        }
        return total;
    }
};

/// Distribution of X = |{e in H : e ⊆ S}| for S ~ mu.
inline CountDistribution live_count_distribution(const Hypergraph &h, BiasedMeasure mu,
                                                 const EvalMode &mode = EvalMode::exact()) {
    CountDistribution out;
    out.pmf.assign(h.size() + 1, 0.0);
    const Mask vars = h.vertices();
    const int v = popcount(vars);
    if (mode.is_exact()) {
        if (v > kDenseCap) {
            throw CapExceeded(std::to_string(v) + " relevant variables exceed the dense cap");
        }
        std::vector<std::uint32_t> count(std::size_t{1} << v, 0);
        for (Mask e : h.edges()) {
            ++count[extract(e, vars)];
        }
        zeta_inplace<std::uint32_t>(count);
        const auto w = mu.level_weights(v);
        for (std::size_t x = 0; x < count.size(); ++x) {
            out.pmf[count[x]] += w[popcount(x)];
        }
        return out;
    }
    Rng rng = stream_rng(mode.mc->seed, 0);
    std::vector<std::uint64_t> hits(out.pmf.size(), 0);
    for (std::uint64_t i = 0; i < mode.mc->samples; ++i) {
        Mask s = 0;
        for (Mask m = vars; m != 0; m &= m - 1) {
            if (bernoulli(rng, mu.p())) {
                s |= m & (~m + 1);
            }
        }
        ++hits[live_edge_count(h, IndexSubset(s))];
    }
    for (std::size_t x = 0; x < hits.size(); ++x) {
        out.pmf[x] = static_cast<double>(hits[x]) / static_cast<double>(mode.mc->samples);
    }
    out.exact = false;
    out.samples = mode.mc->samples;
    return out;
}

/// H' = {A \ B : A in H, A ⊄ B}: the edges that must stay dead once y_B = 1.
inline Hypergraph residual_after_fixing(const Hypergraph &h, IndexSubset b) {
    std::vector<Mask> edges;
    for (Mask e : h.edges()) {
        if (!is_subset(e, b.bits())) {
            edges.push_back(e & ~b.bits());
        }
    }
    return Hypergraph(h.n(), std::move(edges));
}

/// Pr_{y~mu}[y_B = 1 and y_A = 0 for every A in H with A ⊄ B].
inline Estimate uniqueness_prob(const Hypergraph &h, IndexSubset b, BiasedMeasure mu,
                                const EvalMode &mode = EvalMode::exact()) {
    if (!b.within(h.n())) {
        throw std::invalid_argument("B outside ground set");
    }
    const Hypergraph rest = residual_after_fixing(h, b);
    const Mask vars = rest.vertices();
    const int v = popcount(vars);
    const double fixed = std::pow(mu.p(), b.size());
    if (mode.is_exact()) {
        if (v > kDenseCap) {
            throw CapExceeded(std::to_string(v) + " relevant variables exceed the dense cap");
        }
        // dead[x] != 0 iff some residual edge lies inside x.
        std::vector<std::uint8_t> dead(std::size_t{1} << v, 0);
        for (Mask e : rest.edges()) {
            dead[extract(e, vars)] = 1;
        }
        for (std::size_t bit = 1; bit < dead.size(); bit <<= 1) {
            for (std::size_t x = 0; x < dead.size(); ++x) {
                if (x & bit) {
                    dead[x] |= dead[x ^ bit];
                }
            }
        }
        const auto w = mu.level_weights(v);
        double good = 0;
        for (std::size_t x = 0; x < dead.size(); ++x) {
            if (!dead[x]) {
                good += w[popcount(x)];
            }
        }
        return {fixed * good, 0.0, 0, true};
    }
    Rng rng = stream_rng(mode.mc->seed, 0);
    const Mask all = vars | b.bits();
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < mode.mc->samples; ++i) {
        Mask y = 0;
        for (Mask m = all; m != 0; m &= m - 1) {
            if (bernoulli(rng, mu.p())) {
                y |= m & (~m + 1);
            }
        }
        if (!is_subset(b.bits(), y)) {
            continue;
        }
        bool ok = true;
        for (Mask e : rest.edges()) {
            if (is_subset(e, y)) {
                ok = false;
                break;
            }
        }
        hits += ok ? 1 : 0;
    }
    const double n = static_cast<double>(mode.mc->samples);
    const double est = static_cast<double>(hits) / n;
    return {est, std::sqrt(est * (1 - est) / n), mode.mc->samples, false};
}

/// p^|B| * prod over residual edges e of (1 - p^|e|), a lower bound for
/// uniqueness_prob by positive correlation of decreasing events.
inline double uniqueness_lower_bound(const Hypergraph &h, IndexSubset b, BiasedMeasure mu) {
    const Hypergraph rest = residual_after_fixing(h, b);
    double bound = std::pow(mu.p(), b.size());
    for (Mask e : rest.edges()) {
        bound *= 1 - std::pow(mu.p(), popcount(e));
    }
    return bound;
}

}  // namespace bfnlab
