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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <string>
#include <vector>

#include "bfnlab/cube.hpp"
#include "bfnlab/hypergraph.hpp"
#include "bfnlab/oracle.hpp"
#include "bfnlab/parallel.hpp"
#include "bfnlab/valueset.hpp"

namespace bfnlab {

/// Samples are drawn in chunks, each from its own stream, so results do not
/// depend on how chunks are spread across workers.
inline constexpr std::uint64_t kSampleChunk = 1024;

/// Upper clamp on the default sample count.
inline constexpr std::uint64_t kMaxDefaultSamples = 200000;

/// Largest n for which exact mode enumerates every restriction set.
inline constexpr int kExactEnsembleCap = 20;

struct ApproxParams {
    double p = 0.1;
    int degree = 1;
    ValueSet values{0.0, 1.0};
    std::uint64_t n_samples = 0;  // 0 selects max(2000, 50/eps) clamped to kMaxDefaultSamples
    int junta_cap = 4;
    std::uint64_t seed = 0;
    bool exact = false;
    double p0 = 0.2;
    unsigned workers = 1;
    double vote_bucket = 1e-8;

    void validate() const {
        if (!(p > 0 && p <= 0.5)) {
            throw std::invalid_argument("p must lie in (0, 1/2]");
        }
        if (degree < 0) {
            throw std::invalid_argument("degree must be non-negative");
        }
        if (junta_cap < 0) {
            throw std::invalid_argument("junta cap must be non-negative");
        }
        if (!(vote_bucket > 0)) {
            throw std::invalid_argument("vote bucket must be positive");
        }
    }
};

/// A local fit g_S of f|_S under mu_{1/4}, in the y basis with global indices.
struct LocalFit {
    IndexSubset s{0};
    SubsetPoly g;
    double eps = 0;
};

struct LocalEnsemble {
    int n = 0;
    int degree = 0;
    double p_local = 0;  // restriction rate 4p
    std::uint64_t seed = 0;
    bool exact = false;
    std::vector<std::shared_ptr<const LocalFit>> samples;
    std::vector<double> weights;  // 1 per draw, or mu_{4p}(S) in exact mode
    std::uint64_t skipped = 0;    // draws whose local search exceeded its budget

    /// Weighted mean of eps_S, an estimate of E[dist(f,A)^2].
    double mean_eps() const {
        double total = 0;
        double mass = 0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            total += weights[i] * samples[i]->eps;
            mass += weights[i];
        }
        return mass > 0 ? total / mass : 0.0;
    }
};

/// Memoized local fits of one function. Safe to call from several threads.
class LocalFitter {
   public:
    LocalFitter(const TruthTable &tt, const ApproxParams &params) : tt_(tt), params_(params) {
    }

    /// The fit for S, or nullptr when the local search exceeded its budget.
    std::shared_ptr<const LocalFit> fit(IndexSubset s) {
        {
            std::lock_guard lock(mutex_);
            auto it = memo_.find(s.bits());
            if (it != memo_.end()) {
                return it->second;
            }
        }
        std::shared_ptr<const LocalFit> result;
        try {
            result = compute(s);
        } catch (const BudgetExceeded &) {
        } catch (const CapExceeded &) {
        }
        std::lock_guard lock(mutex_);
        return memo_.emplace(s.bits(), result).first->second;
    }

    std::size_t memo_size() const {
        std::lock_guard lock(mutex_);
        return memo_.size();
    }

   private:
    std::shared_ptr<const LocalFit> compute(IndexSubset s) const {
        const BiasedMeasure quarter(0.25);
        TruthTable local = restrict_zero(tt_, s);
        OracleParams op;
        op.degree = params_.degree;
        op.values = params_.values;
        op.junta_cap = params_.junta_cap;
        OracleResult best = oracle_closest(local, op, quarter);
        auto out = std::make_shared<LocalFit>();
        out->s = s;
        out->g = lift(best.g_poly, s.bits(), tt_.n());
        out->eps = expected_sq_dist(local, params_.values, quarter);
        return out;
    }

    const TruthTable &tt_;
    ApproxParams params_;
    mutable std::mutex mutex_;
    std::unordered_map<Mask, std::shared_ptr<const LocalFit>> memo_;
};

namespace detail {

inline std::uint64_t resolve_samples(const TruthTable &tt, const ApproxParams &params) {
    if (params.n_samples > 0) {
        return params.n_samples;
    }
    double eps = expected_sq_dist(tt, params.values, BiasedMeasure(params.p));
    double wanted = eps > 0 ? std::ceil(50.0 / eps) : 0.0;
    return std::min<std::uint64_t>(kMaxDefaultSamples,
                                   std::max<std::uint64_t>(2000, static_cast<std::uint64_t>(std::min(wanted, 1e18))));
}

/// Draws `count` sets S (forced ⊇ `forced`) in seeded chunks and fits each.
inline std::vector<std::shared_ptr<const LocalFit>> sampled_fits(LocalFitter &fitter, int n, IndexSubset forced,
                                                                 double rate, std::uint64_t count,
                                                                 std::uint64_t seed, unsigned workers) {
    const std::uint64_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
    std::vector<std::vector<std::shared_ptr<const LocalFit>>> parts(chunks);
    const BiasedMeasure mu(rate);
    parallel_for(chunks, workers, [&](std::size_t c) {
        Rng rng = stream_rng(seed, c);
        const std::uint64_t begin = c * kSampleChunk;
        const std::uint64_t end = std::min(count, begin + kSampleChunk);
        parts[c].reserve(end - begin);
        for (std::uint64_t i = begin; i < end; ++i) {
            parts[c].push_back(fitter.fit(sample_containing(n, forced, mu, rng)));
        }
    });
    std::vector<std::shared_ptr<const LocalFit>> out;
    out.reserve(count);
    for (auto &part : parts) {
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

/// Every S ⊇ forced with its conditional mu_rate weight, fitted.
inline std::pair<std::vector<std::shared_ptr<const LocalFit>>, std::vector<double>> all_fits(
    LocalFitter &fitter, int n, IndexSubset forced, double rate, unsigned workers) {
    const Mask rest = full_mask(n) & ~forced.bits();
    std::vector<Mask> sets;
    for_each_subset(rest, [&](Mask r) { sets.push_back(r | forced.bits()); });
    std::vector<std::shared_ptr<const LocalFit>> fits(sets.size());
    std::vector<double> weights(sets.size());
    const int free = popcount(rest);
    parallel_for(sets.size(), workers, [&](std::size_t i) {
        fits[i] = fitter.fit(IndexSubset(sets[i]));
        int on = popcount(sets[i] & rest);
        weights[i] = std::pow(rate, on) * std::pow(1 - rate, free - on);
    });
    return {std::move(fits), std::move(weights)};
}

}  // namespace detail

/// Local fits g_S for S ~ mu_{4p} (or every S in exact mode).
inline LocalEnsemble local_fits(LocalFitter &fitter, const TruthTable &tt, const ApproxParams &params) {
    params.validate();
    LocalEnsemble out;
    out.n = tt.n();
    out.degree = params.degree;
    out.p_local = 4 * params.p;
    out.seed = params.seed;
    out.exact = params.exact;
    if (out.p_local >= 1) {
        throw std::invalid_argument("restriction rate 4p must be below 1");
    }
    std::vector<std::shared_ptr<const LocalFit>> fits;
    std::vector<double> weights;
    if (params.exact) {
        if (tt.n() > kExactEnsembleCap) {
            throw CapExceeded("exact ensemble needs n <= " + std::to_string(kExactEnsembleCap));
        }
        std::tie(fits, weights) = detail::all_fits(fitter, tt.n(), IndexSubset(0), out.p_local, params.workers);
    } else {
        const std::uint64_t count = detail::resolve_samples(tt, params);
        fits = detail::sampled_fits(fitter, tt.n(), IndexSubset(0), out.p_local, count, params.seed, params.workers);
        weights.assign(fits.size(), 1.0);
    }
    for (std::size_t i = 0; i < fits.size(); ++i) {
        if (fits[i]) {
            out.samples.push_back(fits[i]);
            out.weights.push_back(weights[i]);
        } else {
            ++out.skipped;
        }
    }
    return out;
}

inline LocalEnsemble local_fits(const TruthTable &tt, const ApproxParams &params) {
    LocalFitter fitter(tt, params);
    return local_fits(fitter, tt, params);
}

/// Outcome of the vote on one coefficient.
struct VoteTally {
    Mask t = 0;
    double value = 0;
    double winner_weight = 0;
    double runner_up_weight = 0;
    double total_weight = 0;
    std::vector<std::pair<double, double>> buckets;  // (representative, weight), ascending value

    double margin() const {
        return total_weight > 0 ? (winner_weight - runner_up_weight) / total_weight : 0.0;
    }
};

namespace detail {

/// Plurality over weighted votes, bucketed to `bucket` width. A bucket is
/// represented by its smallest member; ties go toward 0, then toward the
/// smaller value.
inline VoteTally tally(Mask t, const std::vector<std::pair<double, double>> &votes, double bucket) {
    std::map<long long, std::pair<double, double>> buckets;  // id -> (min value, weight)
    for (const auto &[v, w] : votes) {
        long long id = std::llround(std::floor(v / bucket));
        auto it = buckets.find(id);
        if (it == buckets.end()) {
            buckets.emplace(id, std::make_pair(v, w));
        } else {
            it->second.first = std::min(it->second.first, v);
            it->second.second += w;
        }
    }
    VoteTally out;
    out.t = t;
    bool first = true;
    for (const auto &[id, entry] : buckets) {
        const auto &[v, w] = entry;
        out.buckets.emplace_back(v, w);
        out.total_weight += w;
        bool better = first || w > out.winner_weight ||
                      (w == out.winner_weight &&
                       (std::abs(v) < std::abs(out.value) || (std::abs(v) == std::abs(out.value) && v < out.value)));
        if (better) {
            if (!first) {
                out.runner_up_weight = std::max(out.runner_up_weight, out.winner_weight);
            }
            out.value = v;
            out.winner_weight = w;
            first = false;
        } else {
            out.runner_up_weight = std::max(out.runner_up_weight, w);
        }
    }
    if (std::abs(out.value) < kZeroThreshold) {
        out.value = 0;
    }
    return out;
}

inline std::vector<Mask> candidate_sets(const std::vector<std::shared_ptr<const LocalFit>> &fits, int degree) {
    std::vector<Mask> out{0};
    for (const auto &fit : fits) {
        for (const auto &[key, c] : fit->g.coeffs()) {
            if (popcount(key) <= degree) {
                out.push_back(key);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

/// Diagnostics of a candidate approximation g of f under mu_p.
struct VerifyReport {
    double p = 0;
    double err2 = 0;          // E[(f - g)^2]
    double pr_not_in_A = 0;   // Pr[dist(g, A) > tol]
    bool quantized = false;   // y-coefficients of g lie in the reference set
    std::vector<double> quantization_set;
    double bf = 1;
    double bf_times_p = 0;
    CountDistribution live_counts;  // law of the number of live non-constant monomials
};

struct SparseJuntaResult {
    SubsetPoly g;
    std::string route;  // plurality | constant_p
    std::vector<VoteTally> votes;
    std::uint64_t n_samples = 0;
    double eps = 0;           // exact E[dist(f,A)^2] under mu_p
    double eps_estimate = 0;  // ensemble mean of eps_S
    std::uint64_t skipped = 0;
    VerifyReport report;
};

/// Plurality decoding of an ensemble: each coefficient is voted on by the
/// ensemble members whose set contains it.
inline SparseJuntaResult plurality_decode(const LocalEnsemble &ensemble, double bucket = 1e-8) {
    if (ensemble.samples.empty()) {
        throw std::invalid_argument("cannot decode an empty ensemble");
    }
    SparseJuntaResult out;
    out.route = "plurality";
    out.g = SubsetPoly(ensemble.n);
    out.n_samples = ensemble.samples.size();
    out.eps_estimate = ensemble.mean_eps();
    out.skipped = ensemble.skipped;
    for (Mask t : detail::candidate_sets(ensemble.samples, ensemble.degree)) {
        std::vector<std::pair<double, double>> votes;
        for (std::size_t i = 0; i < ensemble.samples.size(); ++i) {
            const auto &fit = ensemble.samples[i];
            if (is_subset(t, fit->s.bits())) {
                votes.emplace_back(fit->g.coeff(t), ensemble.weights[i]);
            }
        }
        VoteTally tally = detail::tally(t, votes, bucket);
        out.g.set(t, tally.value);
        out.votes.push_back(std::move(tally));
    }
    return out;
}

/// y-coefficients of every A-valued degree-<=d junta on `arity` coordinates;
/// the reference set for quantization checks.
inline ValueSet quantization_set(int arity, int degree, const ValueSet &a) {
    const JuntaCatalog &catalog = junta_catalog(arity, degree, a);
    std::vector<double> coeffs{0.0};
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        auto t = catalog.table(i);
        SubsetPoly y = y_expand(TruthTable(arity, std::vector<double>(t.begin(), t.end())));
        for (const auto &[key, c] : y.coeffs()) {
            coeffs.push_back(c);
        }
    }
    return ValueSet(std::move(coeffs));
}

/// Support of g without the constant monomial.
inline Hypergraph nonconstant_support(const SubsetPoly &g) {
    std::vector<Mask> edges;
    for (const auto &[key, c] : g.coeffs()) {
        if (key != 0) {
            edges.push_back(key);
        }
    }
    return Hypergraph(g.n(), std::move(edges));
}

inline VerifyReport verify_properties(const TruthTable &tt, const SubsetPoly &g, const ApproxParams &params) {
    if (g.n() != tt.n() || !g.basis().is_y()) {
        throw std::invalid_argument("verify: g must be a y-basis polynomial on the same ground set");
    }
    const BiasedMeasure mu(params.p);
    VerifyReport out;
    out.p = params.p;
    const TruthTable gt = to_truth_table(g);
    out.err2 = sq_distance(tt, gt, mu);
    out.pr_not_in_A = expect_map(gt, mu, [&](double v) { return dist(v, params.values) > 1e-8 ? 1.0 : 0.0; });
    const ValueSet ref = quantization_set(std::min(params.junta_cap, 4), params.degree, params.values);
    out.quantization_set = ref.values();
    out.quantized = is_quantized(g, ref);
    out.bf = branching_factor(support(g));
    out.bf_times_p = out.bf * params.p;
    out.live_counts = live_count_distribution(nonconstant_support(g), mu);
    return out;
}

/// The constructive sparse-junta approximation of f.
inline SparseJuntaResult build(const TruthTable &tt, const ApproxParams &params) {
    params.validate();
    if (degree(tt) > params.degree) {
        throw std::invalid_argument("build: input degree exceeds the requested degree");
    }
    SparseJuntaResult out;
    const BiasedMeasure mu(params.p);
    out.eps = expected_sq_dist(tt, params.values, mu);

    if (params.p > params.p0) {
        OracleParams op;
        op.degree = params.degree;
        op.values = params.values;
        op.junta_cap = params.junta_cap;
        op.workers = params.workers;
        OracleResult best = oracle_closest(tt, op, mu);
        out.route = "constant_p";
        out.g = best.g_poly;
        out.eps_estimate = out.eps;
        out.report = verify_properties(tt, out.g, params);
        return out;
    }
    if (4 * params.p * tt.n() < params.degree) {
        throw Error("degenerate restrictions: 4pn < d");
    }

    LocalFitter fitter(tt, params);
    LocalEnsemble ensemble = local_fits(fitter, tt, params);
    out.route = "plurality";
    out.n_samples = ensemble.exact ? ensemble.samples.size() : detail::resolve_samples(tt, params);
    out.eps_estimate = ensemble.mean_eps();
    out.skipped = ensemble.skipped;
    out.g = SubsetPoly(tt.n());

    // Each coefficient is voted on by S ⊇ T drawn from the conditional law.
    for (Mask t : detail::candidate_sets(ensemble.samples, params.degree)) {
        std::vector<std::shared_ptr<const LocalFit>> fits;
        std::vector<double> weights;
        if (params.exact) {
            std::tie(fits, weights) = detail::all_fits(fitter, tt.n(), IndexSubset(t), ensemble.p_local, params.workers);
        } else {
            fits = detail::sampled_fits(fitter, tt.n(), IndexSubset(t), ensemble.p_local, out.n_samples,
                                        hash_combine(params.seed, t + 1), params.workers);
            weights.assign(fits.size(), 1.0);
        }
        std::vector<std::pair<double, double>> votes;
        votes.reserve(fits.size());
        for (std::size_t i = 0; i < fits.size(); ++i) {
            if (fits[i]) {
                votes.emplace_back(fits[i]->g.coeff(t), weights[i]);
            } else {
                ++out.skipped;
            }
        }
        VoteTally tally = detail::tally(t, votes, params.vote_bucket);
        out.g.set(t, tally.value);
        out.votes.push_back(std::move(tally));
    }
    out.report = verify_properties(tt, out.g, params);
    return out;
}

/// G = prod_{a in A} (g - a) in the y basis.
inline SubsetPoly product_G(const SubsetPoly &g, const ValueSet &a) {
    if (!g.basis().is_y()) {
        throw std::invalid_argument("product_G expects a y-basis polynomial");
    }
    SubsetPoly out(g.n());
    out.set(0, 1.0);
    for (double v : a) {
        SubsetPoly shifted = g;
        shifted.add(0, -v);
        out = multiply(out, shifted);
    }
    return out;
}

struct ConverseReport {
    double eps_prime = 0;  // Pr[g not in A]
    double e_dist2 = 0;    // E[dist(g, A)^2]
    double e_G2 = 0;       // E[G^2]
    double bf = 1;
    double bf_times_p = 0;
    double ratio = 0;      // e_dist2 / eps_prime, 0 when eps_prime = 0
    bool exact = true;
    bool quantized = false;
    int degree = 0;
};

/// Quantities relating Pr[g not in A] to E[dist(g,A)^2] for a sparse junta g.
/// `reference` is the coefficient set g is expected to be quantized against.
inline ConverseReport converse_check(const SubsetPoly &g, const ValueSet &a, double p, const ValueSet &reference,
                                     const std::optional<MonteCarloBudget> &mc = std::nullopt) {
    const BiasedMeasure mu(p);
    ConverseReport out;
    out.quantized = is_quantized(g, reference);
    out.degree = g.degree();
    out.bf = branching_factor(support(g));
    out.bf_times_p = out.bf * p;
    Estimate off = expect_poly(
        g, mu, [&](double v) { return dist(v, a) > 1e-8 ? 1.0 : 0.0; }, mc);
    Estimate d2 = expected_sq_dist(g, a, mu, mc);
    const SubsetPoly big_g = product_G(g, a);
    Estimate g2 = expect_poly(
        big_g, mu, [](double v) { return v * v; }, mc);
    out.exact = off.exact && d2.exact && g2.exact;
    out.eps_prime = off.value;
    out.e_dist2 = d2.value;
    out.e_G2 = g2.value;
    out.ratio = out.eps_prime > 0 ? out.e_dist2 / out.eps_prime : 0.0;
    return out;
}

/// A local fit provider: S -> g_S (nullptr when unavailable).
using LocalSource = std::function<std::shared_ptr<const LocalFit>(IndexSubset)>;

struct AgreementResult {
    double rate = 0;
    std::uint64_t pairs = 0;
    std::uint64_t disagreements = 0;
    std::uint64_t skipped = 0;
};

/// Empirical Pr[g_{S1}|_{S1∩S2} != g_{S2}|_{S1∩S2}] for (S1, S2) ~ mu_{p,q}.
/// Here p is the restriction rate itself.
inline AgreementResult agreement_rate(const LocalSource &local, int n, double p, double q, std::uint64_t pairs,
                                      Rng &rng) {
    AgreementResult out;
    for (std::uint64_t i = 0; i < pairs; ++i) {
        auto [s1, s2] = sample_mu_pq(n, p, q, rng);
        auto g1 = local(s1);
        auto g2 = local(s2);
        if (!g1 || !g2) {
            ++out.skipped;
            continue;
        }
        const IndexSubset both = s1 & s2;
        SubsetPoly diff = restrict_zero(g1->g, both) - restrict_zero(g2->g, both);
        bool agree = true;
        for (const auto &[key, c] : diff.coeffs()) {
            if (std::abs(c) > 1e-8) {
                agree = false;
                break;
            }
        }
        ++out.pairs;
        out.disagreements += agree ? 0 : 1;
    }
    out.rate = out.pairs > 0 ? static_cast<double>(out.disagreements) / static_cast<double>(out.pairs) : 0.0;
    return out;
}

}  // namespace bfnlab
