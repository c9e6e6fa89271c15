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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfnlab/cube.hpp"
#include "bfnlab/hypergraph.hpp"
#include "bfnlab/valueset.hpp"

namespace bfnlab {

/// Largest number of monomials fd_construct will materialize.
inline constexpr std::uint64_t kFdTermBudget = std::uint64_t{1} << 22;

struct FdSpec {
    int d = 1;
    int n = 1;
};

/// f_d = sum_{1<=|S|<=d} (-1)^{|S|-1} y_S.
inline SubsetPoly fd_construct(const FdSpec &spec) {
    if (spec.d < 1 || spec.n < 0 || spec.n > kMaxVars) {
        throw std::invalid_argument("f_d needs d >= 1 and 0 <= n <= 63");
    }
    double terms = 0;
    for (int e = 1; e <= std::min(spec.d, spec.n); ++e) {
        terms += std::exp(std::lgamma(spec.n + 1.0) - std::lgamma(e + 1.0) - std::lgamma(spec.n - e + 1.0));
    }
    if (terms > static_cast<double>(kFdTermBudget)) {
        throw BudgetExceeded("f_d with n=" + std::to_string(spec.n) + ", d=" + std::to_string(spec.d) +
                             " has too many monomials");
    }
    SubsetPoly out(spec.n);
    for (int e = 1; e <= std::min(spec.d, spec.n); ++e) {
        const double sign = (e % 2 == 1) ? 1.0 : -1.0;
        for_each_combination(spec.n, e, [&](Mask s) { out.set(s, sign); });
    }
    return out;
}

/// Value of f_d at a point with exactly m live coordinates:
/// 1 - sum_{e=0}^{d} (-1)^e C(m, e).
inline std::int64_t fd_value(int d, int m) {
    if (d < 0 || m < 0) {
        throw std::invalid_argument("fd_value needs d, m >= 0");
    }
    Int128 total = 1;
    Int128 binom = 1;  // C(m, e)
    for (int e = 0; e <= std::min(d, m); ++e) {
        if (e > 0) {
            binom = binom * (m - e + 1) / e;
        }
        total -= (e % 2 == 0) ? binom : -binom;
        if (binom > (Int128{1} << 100)) {
            throw std::overflow_error("fd_value overflow");
        }
    }
    if (total > INT64_MAX || total < INT64_MIN) {
        throw std::overflow_error("fd_value overflow");
    }
    return static_cast<std::int64_t>(total);
}

struct MomentReport {
    int k = 0;
    int d = 0;
    bool uniform = true;
    double moment = 0;  // E[X^k]
    double bf = 1;
    double c = 0;       // bf * p
    double c_eff = 1;   // max(1, c)
    double bound = 0;   // (c_eff k d)^{kd}, or (2 c_eff k d)^{kd} for mixed sizes
    double slack = 0;   // bound / moment
    bool holds = true;
};

/// E[X^k] for X = number of edges inside S ~ mu, against the moment bound.
///
/// The counting argument bounds a sum of C^m over patterns with m <= kd
/// vertices by C^{kd}, which needs C >= 1; hence c_eff.
inline MomentReport moment_check(const Hypergraph &h, BiasedMeasure mu, int k,
                                 const EvalMode &mode = EvalMode::exact()) {
    if (k < 1) {
        throw std::invalid_argument("moment order must be >= 1");
    }
    MomentReport out;
    out.k = k;
    out.d = std::max(1, h.max_edge_size());
    out.uniform = h.is_uniform();
    out.moment = live_count_distribution(h, mu, mode).moment(k);
    out.bf = branching_factor(h);
    out.c = out.bf * mu.p();
    out.c_eff = std::max(1.0, out.c);
    const double kd = static_cast<double>(k) * out.d;
    const double base = (out.uniform ? 1.0 : 2.0) * out.c_eff * kd;
    out.bound = std::pow(base, kd);
    out.slack = out.moment > 0 ? out.bound / out.moment : INFINITY;
    out.holds = out.moment <= out.bound * (1 + 1e-12);
    return out;
}

struct TailPoint {
    double t = 0;
    double tail = 0;  // Pr[X >= t] or Pr[|f| >= t]
    double lo = 0;    // Wilson 95% interval; equal to tail when exact
    double hi = 0;
    bool exact = true;
};

namespace detail {

inline std::pair<double, double> wilson(double hits, double n, double z = 1.96) {
    if (n <= 0) {
        return {0.0, 1.0};
    }
    const double phat = hits / n;
    const double denom = 1 + z * z / n;
    const double center = (phat + z * z / (2 * n)) / denom;
    const double half = z * std::sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace detail

/// The default t-grid {1, 2, 4, 8, 16} scaled by the coefficient bound m.
inline std::vector<double> default_t_grid(double m = 1.0) {
    return {m, 2 * m, 4 * m, 8 * m, 16 * m};
}

/// Tail of the live edge count X of a hypergraph.
inline std::vector<TailPoint> tail_estimate(const Hypergraph &h, BiasedMeasure mu, const std::vector<double> &grid,
                                            const EvalMode &mode = EvalMode::exact()) {
    CountDistribution dist = live_count_distribution(h, mu, mode);
    std::vector<TailPoint> out;
    for (double t : grid) {
        double tail = dist.tail(t);
        TailPoint pt{t, tail, tail, tail, dist.exact};
        if (!dist.exact) {
            std::tie(pt.lo, pt.hi) = detail::wilson(tail * static_cast<double>(dist.samples),
                                                    static_cast<double>(dist.samples));
        }
        out.push_back(pt);
    }
    return out;
}

/// Tail Pr[|f| >= t] of a polynomial.
inline std::vector<TailPoint> tail_estimate(const SubsetPoly &f, BiasedMeasure mu, const std::vector<double> &grid,
                                            const std::optional<MonteCarloBudget> &mc = std::nullopt) {
    std::vector<TailPoint> out;
    for (double t : grid) {
        Estimate e = expect_poly(
            f, mu, [t](double v) { return std::abs(v) >= t - 1e-12 ? 1.0 : 0.0; }, mc);
        TailPoint pt{t, e.value, e.value, e.value, e.exact};
        if (!e.exact) {
            std::tie(pt.lo, pt.hi) =
                detail::wilson(e.value * static_cast<double>(e.samples), static_cast<double>(e.samples));
        }
        out.push_back(pt);
    }
    return out;
}

struct BiasProfile {
    double a_star = 0;
    double pr_ne = 0;                      // Pr[round(g, A) != a_star]
    std::map<double, double> rounded;      // a -> Pr[round(g, A) = a]
    std::map<double, double> histogram;    // value -> probability, values merged at 1e-9
};

inline BiasProfile bias_profile(const TruthTable &g, const ValueSet &a, BiasedMeasure mu) {
    BiasProfile out;
    const auto w = mu.level_weights(g.n());
    std::map<long long, std::pair<double, double>> buckets;
    for (double v : a) {
        out.rounded[v] = 0.0;
    }
    for (std::size_t m = 0; m < g.size(); ++m) {
        const double weight = w[popcount(m)];
        out.rounded[round_to(g[m], a)] += weight;
        long long id = std::llround(std::floor(g[m] / 1e-9));
        auto [it, fresh] = buckets.try_emplace(id, g[m], 0.0);
        it->second.first = std::min(it->second.first, g[m]);
        it->second.second += weight;
    }
    for (const auto &[id, entry] : buckets) {
        out.histogram[entry.first] += entry.second;
    }
    double best = -1;
    for (const auto &[v, pr] : out.rounded) {
        if (pr > best) {  // ascending order, so ties keep the smaller value
            best = pr;
            out.a_star = v;
        }
    }
    out.pr_ne = 1 - best;
    return out;
}

inline BiasProfile bias_profile(const SubsetPoly &g, const ValueSet &a, BiasedMeasure mu) {
    LocalTable lt = relevant_table(g);
    return bias_profile(lt.table, a, mu);
}

/// Pr[f_d not in {0,1}] at p = delta / n, by summing over the number of live
/// coordinates with exact binomial weights.
inline double fd_off_binary_prob(int d, int n, double p) {
    double total = 0;
    for (int m = 0; m <= n; ++m) {
        std::int64_t v = fd_value(d, m);
        if (v != 0 && v != 1) {
            total += std::exp(std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0) +
                              m * std::log(p) + (n - m) * std::log1p(-p));
        }
    }
    return total;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("slope needs at least two matching points");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0 && y[i] > 0)) {
            throw std::invalid_argument("log-log slope needs positive data");
        }
        double lx = std::log(x[i]);
        double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace bfnlab
