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
#include <numeric>
#include <vector>

#include "bfnlab/cube.hpp"
#include "bfnlab/hypergraph.hpp"
#include "bfnlab/oracle.hpp"
#include "bfnlab/rng.hpp"
#include "bfnlab/valueset.hpp"

namespace bfnlab {

/// A generated function with its ground truth.
struct PlantedInstance {
    TruthTable f;
    SubsetPoly truth;  // y basis
    SubsetPoly noise;  // y basis; f = truth + noise
    double noise_norm2 = 0;  // E_mu[noise^2]
};

inline std::size_t uniform_index(Rng &rng, std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

/// Uniformly random set of k distinct coordinates out of n.
inline Mask random_coordinates(int n, int k, Rng &rng) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    Mask out = 0;
    for (int i = 0; i < k; ++i) {
        std::size_t j = static_cast<std::size_t>(i) + uniform_index(rng, static_cast<std::size_t>(n - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
        out |= Mask{1} << idx[static_cast<std::size_t>(i)];
    }
    return out;
}

/// A random non-constant A-valued degree-<=d junta on `arity` random
/// coordinates of [n], in the y basis.
inline SubsetPoly random_catalog_junta(int n, int arity, int d, const ValueSet &a, Rng &rng) {
    const JuntaCatalog &catalog = junta_catalog(arity, d, a);
    std::vector<std::size_t> nonconstant;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        auto t = catalog.table(i);
        if (std::any_of(t.begin(), t.end(), [&](double v) { return v != t[0]; })) {
            nonconstant.push_back(i);
        }
    }
    if (nonconstant.empty()) {
        throw Error("no non-constant junta of the requested shape");
    }
    auto t = catalog.table(nonconstant[uniform_index(rng, nonconstant.size())]);
    SubsetPoly local = y_expand(TruthTable(arity, std::vector<double>(t.begin(), t.end())));
    return lift(local, random_coordinates(n, arity, rng), n);
}

/// Planted sparse junta g* plus sparse y-basis noise with E_{mu_p}[noise^2]
/// drawn uniformly from [noise_lo, noise_hi]. Noise monomials have size 1 or 2
/// and random signs.
inline PlantedInstance planted_sparse_junta(int n, double p, int d, const ValueSet &a, double noise_lo,
                                            double noise_hi, Rng &rng, int arity = 4, int noise_terms = 3) {
    PlantedInstance out;
    out.truth = random_catalog_junta(n, std::min(arity, n), d, a, rng);
    out.noise = SubsetPoly(n);
    const int terms = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(noise_terms)));
    for (int i = 0; i < terms; ++i) {
        int size = std::min({1 + static_cast<int>(uniform_index(rng, 2)), d, n});
        Mask key = random_coordinates(n, std::max(size, 1), rng);
        double sign = bernoulli(rng, 0.5) ? 1.0 : -1.0;
        out.noise.add(key, sign * (0.5 + uniform01(rng)));
    }
    const BiasedMeasure mu(p);
    const double target = noise_lo + (noise_hi - noise_lo) * uniform01(rng);
    const double raw = out.noise.empty() ? 0.0 : std::pow(norm2(to_truth_table(out.noise), mu), 2);
    if (raw > 0 && target > 0) {
        const double scale = std::sqrt(target / raw);
        SubsetPoly scaled(n);
        for (const auto &[key, c] : out.noise.coeffs()) {
            scaled.set(key, c * scale);
        }
        out.noise = scaled;
    } else {
        out.noise = SubsetPoly(n);
    }
    out.noise_norm2 = out.noise.empty() ? 0.0 : std::pow(norm2(to_truth_table(out.noise), mu), 2);
    out.f = to_truth_table(out.truth + out.noise);
    return out;
}

/// A-valued degree-<=d junta on `arity` coordinates plus a uniform-measure
/// perturbation of Fourier degree <= d with E[perturbation^2] = noise.
inline PlantedInstance perturbed_junta(int n, int arity, int d, const ValueSet &a, double noise, Rng &rng,
                                       int noise_terms = 4) {
    PlantedInstance out;
    out.truth = random_catalog_junta(n, std::min(arity, n), d, a, rng);
    SubsetPoly pert(n, Basis::fourier(0.5));
    if (noise > 0) {
        for (int i = 0; i < noise_terms; ++i) {
            int size = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(std::max(d, 1))));
            Mask key = random_coordinates(n, std::min(size, n), rng);
            pert.add(key, (bernoulli(rng, 0.5) ? 1.0 : -1.0) * (0.5 + uniform01(rng)));
        }
        double mass = 0;
        for (const auto &[key, c] : pert.coeffs()) {
            mass += c * c;
        }
        SubsetPoly scaled(n, pert.basis());
        for (const auto &[key, c] : pert.coeffs()) {
            scaled.set(key, c * std::sqrt(noise / mass));
        }
        pert = scaled;
    }
    out.noise = pert.empty() ? SubsetPoly(n) : to_y_basis(pert);
    out.noise_norm2 = 0;
    for (const auto &[key, c] : pert.coeffs()) {
        out.noise_norm2 += c * c;
    }
    out.f = to_truth_table(out.truth + out.noise);
    return out;
}

/// Random hypergraph on [n] with edge sizes in [min_size, max_size] and
/// branching factor at most rho, grown greedily: each proposal is kept only
/// if the bound still holds.
inline Hypergraph random_bf_hypergraph(int n, int min_size, int max_size, double rho, std::size_t target_edges,
                                       Rng &rng, std::size_t max_attempts = 0) {
    if (min_size < 0 || max_size < min_size || max_size > n) {
        throw std::invalid_argument("invalid edge size range");
    }
    if (max_attempts == 0) {
        max_attempts = 20 * target_edges + 100;
    }
    std::vector<Mask> edges;
    for (std::size_t attempt = 0; attempt < max_attempts && edges.size() < target_edges; ++attempt) {
        int size = min_size + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(max_size - min_size + 1)));
        Mask e = random_coordinates(n, size, rng);
        if (std::find(edges.begin(), edges.end(), e) != edges.end()) {
            continue;
        }
        edges.push_back(e);
        if (!has_branching_factor(Hypergraph(n, edges), rho)) {
            edges.pop_back();
        }
    }
    return Hypergraph(n, std::move(edges));
}

}  // namespace bfnlab
