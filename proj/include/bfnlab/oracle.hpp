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

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bfnlab/cube.hpp"
#include "bfnlab/parallel.hpp"
#include "bfnlab/valueset.hpp"

namespace bfnlab {

/// Default cap on the number of candidate value assignments enumerated when
/// building a junta catalog.
inline constexpr std::uint64_t kCatalogBudget = std::uint64_t{1} << 26;

/// All A-valued functions of degree <= d on `arity` coordinates, as dense
/// tables of 2^arity entries, in enumeration order.
///
/// A degree-<=d function is determined by its values on points of weight <= d,
/// so candidates are enumerated over those values only and kept when every
/// other point also lands in A.
class JuntaCatalog {
   public:
    JuntaCatalog(int arity, int degree, const ValueSet &values, std::uint64_t budget = kCatalogBudget)
        : arity_(arity), degree_(degree), values_(values) {
        if (arity < 0 || arity > 8) {
            throw CapExceeded("catalog arity " + std::to_string(arity) + " out of range");
        }
        const std::size_t width = std::size_t{1} << arity;
        std::vector<Mask> free_points;
        for (Mask x = 0; x < width; ++x) {
            if (popcount(x) <= degree) {
                free_points.push_back(x);
            }
        }
        const std::size_t levels = free_points.size();
        double candidates = std::pow(static_cast<double>(values.size()), static_cast<double>(levels));
        if (candidates > static_cast<double>(budget)) {
            throw BudgetExceeded("catalog of " + std::to_string(values.size()) + "-valued degree-" +
                                 std::to_string(degree) + " functions on " + std::to_string(arity) +
                                 " coordinates needs " + std::to_string(candidates) + " candidates");
        }

        // basis[j] is the degree-<=d function that is 1 at free_points[j] and 0
        // at every other free point.
        std::vector<std::vector<double>> basis(levels, std::vector<double>(width, 0.0));
        for (std::size_t j = 0; j < levels; ++j) {
            std::vector<double> v(width, 0.0);
            v[free_points[j]] = 1.0;
            moebius_inplace<double>(v);
            for (Mask s = 0; s < width; ++s) {
                if (popcount(s) > degree) {
                    v[s] = 0.0;
                }
            }
            zeta_inplace<double>(v);
            basis[j] = std::move(v);
        }

        std::vector<std::size_t> digit(levels, 0);
        std::vector<double> table(width, 0.0);
        auto rebuild = [&] {
            std::fill(table.begin(), table.end(), 0.0);
            for (std::size_t j = 0; j < levels; ++j) {
                double a = values[digit[j]];
                if (a != 0.0) {
                    for (std::size_t x = 0; x < width; ++x) {
                        table[x] += a * basis[j][x];
                    }
                }
            }
        };
        rebuild();
        std::vector<double> snapped(width);
        while (true) {
            bool ok = true;
            for (std::size_t x = 0; x < width && ok; ++x) {
                std::size_t idx = values.nearest_index(table[x]);
                ok = std::abs(table[x] - values[idx]) <= 1e-9;
                snapped[x] = values[idx];
            }
            if (ok) {
                tables_.insert(tables_.end(), snapped.begin(), snapped.end());
            }
            // Odometer step; the lowest digit moves fastest.
            std::size_t j = 0;
            while (j < levels && digit[j] + 1 == values.size()) {
                digit[j] = 0;
                ++j;
            }
            if (j == levels) {
                break;
            }
            ++digit[j];
            rebuild();
        }
    }

    int arity() const {
        return arity_;
    }
    int degree() const {
        return degree_;
    }
    const ValueSet &values() const {
        return values_;
    }
    std::size_t width() const {
        return std::size_t{1} << arity_;
    }
    std::size_t size() const {
        return tables_.size() / width();
    }
    std::span<const double> table(std::size_t i) const {
        return std::span<const double>(tables_).subspan(i * width(), width());
    }

   private:
    int arity_;
    int degree_;
    ValueSet values_;
    std::vector<double> tables_;
};

/// Process-wide cache of catalogs keyed by (arity, degree, values).
inline const JuntaCatalog &junta_catalog(int arity, int degree, const ValueSet &values,
                                         std::uint64_t budget = kCatalogBudget) {
    using Key = std::tuple<int, int, std::vector<double>>;
    static std::mutex mutex;
    static std::map<Key, std::unique_ptr<JuntaCatalog>> cache;
    Key key{arity, degree, values.values()};
    {
        std::lock_guard lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) {
            return *it->second;
        }
    }
    auto built = std::make_unique<JuntaCatalog>(arity, degree, values, budget);
    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.emplace(std::move(key), std::move(built));
    return *it->second;
}

struct OracleParams {
    int degree = 1;
    ValueSet values{0.0, 1.0};
    int junta_cap = 4;
    bool exhaustive = false;
    unsigned workers = 1;
    std::uint64_t max_work = std::uint64_t{1} << 34;
};

struct OracleResult {
    TruthTable g;
    SubsetPoly g_poly;  // y-expansion of g
    double err = 0;
    IndexSubset junta{0};
    bool fast_path = false;
    std::uint64_t subsets_searched = 0;
};

namespace detail {

inline double binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    double r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

/// True when some value sits exactly halfway between two elements of A.
inline bool has_rounding_tie(const TruthTable &tt, const ValueSet &a) {
    for (double v : tt.values()) {
        std::size_t i = a.nearest_index(v);
        if (i + 1 < a.size() && v - a[i] == a[i + 1] - v) {
            return true;
        }
    }
    return false;
}

inline TruthTable lift_junta(std::span<const double> local, Mask junta, int n) {
    return TruthTable::generate(n, [&](Mask m) { return local[extract(m, junta)]; });
}

}  // namespace detail

/// Closest A-valued function of degree <= d in E_mu[(f-g)^2], searched over
/// juntas on min(junta_cap, n) coordinates (every coordinate when exhaustive).
/// Ties go to the first candidate in ascending junta mask, then catalog order.
inline OracleResult oracle_closest(const TruthTable &tt, const OracleParams &params, BiasedMeasure mu) {
    const int n = tt.n();
    const int k = params.exhaustive ? n : std::min(params.junta_cap, n);
    const int d = std::min(params.degree, k);
    const ValueSet &a = params.values;
    if (params.degree < 0) {
        throw std::invalid_argument("degree must be non-negative");
    }

    // The pointwise rounding is the unique optimum over all A-valued functions
    // when there are no ties; keep it whenever it lies in the searched class.
    TruthTable rounded = round_to(tt, a);
    if (!detail::has_rounding_tie(tt, a)) {
        std::vector<double> coeffs(rounded.values().begin(), rounded.values().end());
        moebius_inplace<double>(coeffs);
        int deg = 0;
        Mask vars = 0;
        for (std::size_t m = 0; m < coeffs.size(); ++m) {
            if (!is_negligible(coeffs[m])) {
                deg = std::max(deg, popcount(m));
                vars |= m;
            }
        }
        if (deg <= params.degree && popcount(vars) <= k) {
            OracleResult out;
            out.g_poly = SubsetPoly(n);
            for (std::size_t m = 0; m < coeffs.size(); ++m) {
                if (!is_negligible(coeffs[m])) {
                    out.g_poly.set(m, coeffs[m]);
                }
            }
            out.err = sq_distance(tt, rounded, mu);
            out.g = std::move(rounded);
            out.junta = IndexSubset(vars);
            out.fast_path = true;
            return out;
        }
    }

    const JuntaCatalog &catalog = junta_catalog(k, d, a);
    const double subsets = detail::binomial(n, k);
    const double work = subsets * (static_cast<double>(tt.size()) +
                                   static_cast<double>(catalog.size()) * static_cast<double>(catalog.width()));
    if (work > static_cast<double>(params.max_work)) {
        throw BudgetExceeded("oracle search needs about " + std::to_string(work) + " operations");
    }

    std::vector<Mask> juntas;
    for_each_combination(n, k, [&](Mask j) { juntas.push_back(j); });

    const auto w = mu.level_weights(n);
    double second_moment = 0;
    for (std::size_t m = 0; m < tt.size(); ++m) {
        second_moment += w[popcount(m)] * tt[m] * tt[m];
    }

    struct Best {
        double err = INFINITY;
        std::size_t index = 0;
    };
    std::vector<Best> best(juntas.size());
    parallel_for(juntas.size(), params.workers, [&](std::size_t ji) {
        const Mask junta = juntas[ji];
        const std::size_t cells = catalog.width();
        std::vector<double> weight(cells, 0.0);
        std::vector<double> mass(cells, 0.0);
        for (std::size_t m = 0; m < tt.size(); ++m) {
            std::size_t z = extract(m, junta);
            weight[z] += w[popcount(m)];
            mass[z] += w[popcount(m)] * tt[m];
        }
        // err(h) = E f^2 - sum w c^2 + sum w (h - c)^2 with cell means c.
        double base = second_moment;
        for (std::size_t z = 0; z < cells; ++z) {
            mass[z] /= weight[z];
            base -= weight[z] * mass[z] * mass[z];
        }
        Best local;
        for (std::size_t i = 0; i < catalog.size(); ++i) {
            auto h = catalog.table(i);
            double e = base;
            for (std::size_t z = 0; z < cells; ++z) {
                double diff = h[z] - mass[z];
                e += weight[z] * diff * diff;
            }
            if (e < local.err - 1e-13) {
                local = {e, i};
            }
        }
        best[ji] = local;
    });

    std::size_t winner = 0;
    for (std::size_t ji = 1; ji < juntas.size(); ++ji) {
        if (best[ji].err < best[winner].err - 1e-12) {
            winner = ji;
        }
    }
    if (juntas.empty() || catalog.size() == 0) {
        throw Error("oracle search space is empty");
    }
    OracleResult out;
    out.g = detail::lift_junta(catalog.table(best[winner].index), juntas[winner], n);
    out.g_poly = y_expand(out.g);
    out.err = sq_distance(tt, out.g, mu);
    out.junta = IndexSubset(juntas[winner]);
    out.subsets_searched = juntas.size();
    return out;
}

/// f_a = prod_{b != a} (f - b) / (a - b), one table per element of A in order.
inline std::vector<std::pair<double, TruthTable>> a_indicators(const TruthTable &tt, const ValueSet &a) {
    if (a.size() < 2) {
        throw std::invalid_argument("a_indicators needs at least two values");
    }
    std::vector<std::pair<double, TruthTable>> out;
    for (double target : a) {
        out.emplace_back(target, transform(tt, [&](double v) {
                             double r = 1;
                             for (double b : a) {
                                 if (b != target) {
                                     r *= (v - b) / (target - b);
                                 }
                             }
                             return r;
                         }));
    }
    return out;
}

/// The constant in A closest to f in L2.
inline TruthTable best_constant(const TruthTable &tt, const ValueSet &a, BiasedMeasure mu) {
    return TruthTable::constant(tt.n(), round_to(expectation(tt, mu), a));
}

struct FknResult {
    TruthTable g;
    IndexSubset junta{0};
    double eps = 0;        // E[dist(f^{<=1}, A)^2]
    double threshold = 0;  // m * eps
    double tail = 0;       // level-1 mass outside the junta
    double projected_mass = 0;  // mass above level 1 removed before the construction
    double err = 0;        // ||f - g||^2
    bool fallback = false;  // rounding produced degree > 1; a constant was used
};

/// A-valued FKN construction at the uniform measure.
inline FknResult fkn_approx(const TruthTable &tt, const ValueSet &a, bool project = true) {
    const BiasedMeasure half(0.5);
    SubsetPoly fhat = fourier_expand(tt, half);
    FknResult out;
    SubsetPoly low(tt.n(), fhat.basis());
    for (const auto &[key, c] : fhat.coeffs()) {
        if (popcount(key) <= 1) {
            low.set(key, c);
        } else {
            out.projected_mass += c * c;
        }
    }
    if (!project && out.projected_mass > 0) {
        throw std::invalid_argument("fkn_approx: input has degree above 1");
    }
    const TruthTable f1 = to_truth_table(low);
    out.eps = expected_sq_dist(f1, a, half);
    const double m = std::pow(2.0, static_cast<double>(a.size()) + 1);
    out.threshold = m * out.eps;

    SubsetPoly h(tt.n(), fhat.basis());
    h.set(0, low.coeff(0));
    Mask junta = 0;
    for (int i = 0; i < tt.n(); ++i) {
        double c = low.coeff(Mask{1} << i);
        if (c == 0.0) {
            continue;
        }
        if (c * c >= out.threshold) {
            junta |= Mask{1} << i;
            h.set(Mask{1} << i, c);
        } else {
            out.tail += c * c;
        }
    }
    out.junta = IndexSubset(junta);
    out.g = round_to(to_truth_table(h), a);
    if (degree(out.g) > 1) {
        out.fallback = true;
        out.g = best_constant(f1, a, half);
    }
    out.err = sq_distance(tt, out.g, half);
    return out;
}

/// Caps on the enumerations that realize the finite coefficient sets of the
/// recursive construction.
struct QuantCaps {
    int b_arity = 4;  // arity of the A-valued juntas whose coefficients form B
    int c_arity = 3;  // coordinates of the B-valued affine functions forming C
    std::uint64_t budget = kCatalogBudget;
};

/// Uniform-measure Fourier coefficients of every A-valued degree-<=d function
/// on `arity` coordinates.
inline ValueSet catalog_coefficients(int arity, int degree, const ValueSet &a, std::uint64_t budget) {
    const JuntaCatalog &catalog = junta_catalog(arity, degree, a, budget);
    std::vector<double> coeffs{0.0};
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        auto t = catalog.table(i);
        TruthTable table(arity, std::vector<double>(t.begin(), t.end()));
        SubsetPoly fhat = fourier_expand(table, BiasedMeasure(0.5));
        for (const auto &[key, c] : fhat.coeffs()) {
            coeffs.push_back(c);
        }
    }
    return ValueSet(std::move(coeffs));
}

/// Fourier coefficients of every B-valued affine function on up to `arity`
/// coordinates, plus 0. At the uniform measure such a function is fixed by its
/// value b0 at the origin and its values b_i at the unit vectors: c_i =
/// (b_i - b0)/2 and c_0 = b0 + sum c_i.
inline ValueSet affine_coefficients(const ValueSet &b, int arity, std::uint64_t budget) {
    const double candidates = std::pow(static_cast<double>(b.size()), arity + 1.0);
    if (candidates > static_cast<double>(budget)) {
        throw BudgetExceeded("affine coefficient enumeration needs " + std::to_string(candidates) + " candidates");
    }
    std::vector<double> coeffs{0.0};
    for (int k = 0; k <= arity; ++k) {
        std::vector<std::size_t> digit(static_cast<std::size_t>(k) + 1, 0);
        while (true) {
            const double b0 = b[digit[0]];
            std::vector<double> c(static_cast<std::size_t>(k) + 1);
            c[0] = b0;
            for (int i = 1; i <= k; ++i) {
                c[i] = (b[digit[i]] - b0) / 2;
                c[0] += c[i];
            }
            bool ok = true;
            for (Mask x = 0; x < (Mask{1} << k) && ok; ++x) {
                double v = c[0];
                for (int i = 0; i < k; ++i) {
                    v += ((x >> i) & 1) ? c[i + 1] : -c[i + 1];
                }
                ok = b.contains(v, 1e-9);
            }
            if (ok) {
                coeffs.insert(coeffs.end(), c.begin(), c.end());
            }
            std::size_t j = 0;
            while (j < digit.size() && digit[j] + 1 == b.size()) {
                digit[j] = 0;
                ++j;
            }
            if (j == digit.size()) {
                break;
            }
            ++digit[j];
        }
    }
    return ValueSet(std::move(coeffs));
}

struct KsLevel {
    int degree = 0;
    std::string route;  // round | constant | fkn | recursive | fallback
    double eps = 0;
    double delta = 0;
    std::size_t a_size = 0;
    std::size_t b_size = 0;
    std::size_t c_size = 0;
    std::size_t d_size = 0;
    std::size_t e_size = 0;
    double err = 0;  // ||input - output||^2 at this level
};

struct KsResult {
    TruthTable g;
    double err = 0;
    std::vector<KsLevel> trace;
};

namespace detail {

inline TruthTable ks_level(const TruthTable &f, const ValueSet &a, int d, const QuantCaps &caps,
                           std::vector<KsLevel> &trace) {
    const BiasedMeasure half(0.5);
    const std::size_t slot = trace.size();
    trace.emplace_back();
    KsLevel level;
    level.degree = d;
    level.a_size = a.size();

    const TruthTable fd = project_degree(f, d, half);
    level.eps = expected_sq_dist(fd, a, half);
    level.delta = d > 0 ? std::pow(level.eps, 1.0 / d) : 0.0;

    TruthTable r;
    if (d == 0) {
        level.route = "round";
        r = best_constant(fd, a, half);
    } else if (level.eps > std::pow(2.0, -d)) {
        level.route = "constant";
        r = best_constant(fd, a, half);
    } else if (d == 1) {
        level.route = "fkn";
        r = fkn_approx(fd, a).g;
    } else {
        level.route = "recursive";
        const ValueSet b = catalog_coefficients(caps.b_arity, d - 1, a, caps.budget);
        const int c_arity = std::min(static_cast<int>(b.size()) - 1, caps.c_arity);
        const ValueSet c = affine_coefficients(b, c_arity, caps.budget);
        level.b_size = b.size();
        level.c_size = c.size();

        const SubsetPoly fhat = fourier_expand(fd, half);
        SubsetPoly hpoly(f.n(), fhat.basis());
        for (const auto &[key, coef] : fhat.coeffs()) {
            int size = popcount(key);
            if (size >= d - 1 && size <= d) {
                hpoly.set(key, round_to(coef, c));
            }
        }
        const TruthTable h = to_truth_table(hpoly);
        const ValueSet dset(std::vector<double>(h.values().begin(), h.values().end()));
        const ValueSet e = minkowski_diff(a, dset);
        level.d_size = dset.size();
        level.e_size = e.size();

        const TruthTable low = project_degree(fd, d - 2, half);
        const TruthTable g = ks_level(low, e, d - 2, caps, trace);
        r = round_to(combine(g, h, [](double x, double y) { return x + y; }), a);
        if (degree(r) > d) {
            level.route = "fallback";
            r = best_constant(fd, a, half);
        }
    }
    level.err = sq_distance(f, r, half);
    trace[slot] = level;
    return r;
}

}  // namespace detail

/// Recursive A-valued Kindler-Safra construction at the uniform measure.
inline KsResult ks_recursive(const TruthTable &tt, const ValueSet &a, int d, const QuantCaps &caps = {}) {
    if (d < 1) {
        throw std::invalid_argument("ks_recursive needs degree >= 1");
    }
    KsResult out;
    out.g = detail::ks_level(tt, a, d, caps, out.trace);
    out.err = sq_distance(tt, out.g, BiasedMeasure(0.5));
    return out;
}

}  // namespace bfnlab
