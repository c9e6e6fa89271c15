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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "bfnlab/bits.hpp"
#include "bfnlab/dyadic.hpp"
#include "bfnlab/rng.hpp"

namespace bfnlab {

/// Coefficients with magnitude below this are treated as exact zeros.
inline constexpr double kZeroThreshold = 1e-10;

/// Largest dimension for which expectations are computed by full enumeration.
inline constexpr int kDenseCap = 24;

inline bool is_negligible(double v) {
    return std::abs(v) < kZeroThreshold;
}
inline bool is_negligible(const Dyadic &v) {
    return v.is_zero();
}

/// The product measure mu_p on {0,1}^n.
class BiasedMeasure {
   public:
    explicit BiasedMeasure(double p) : p_(p) {
        if (!(p > 0.0 && p < 1.0)) {
            throw std::invalid_argument("bias p must lie in (0,1), got " + std::to_string(p));
        }
    }
    double p() const {
        return p_;
    }
    /// w[k] = p^k (1-p)^(n-k): the weight of any single point with k ones.
    std::vector<double> level_weights(int n) const {
        std::vector<double> w(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) {
            w[k] = std::pow(p_, k) * std::pow(1.0 - p_, n - k);
        }
        return w;
    }
    double weight(int n, Mask m) const {
        int k = popcount(m);
        return std::pow(p_, k) * std::pow(1.0 - p_, n - k);
    }

   private:
    double p_;
};

/// Which basis a SubsetPoly's coefficients refer to.
struct Basis {
    enum class Kind { Y, Fourier };
    Kind kind = Kind::Y;
    double p = 0.5;  // only meaningful for Fourier

    static Basis y() {
        return {};
    }
    static Basis fourier(double p) {
        BiasedMeasure check(p);
        return {Kind::Fourier, p};
    }
    bool is_y() const {
        return kind == Kind::Y;
    }
    friend bool operator==(const Basis &a, const Basis &b) {
        return a.kind == b.kind && (a.kind == Kind::Y || a.p == b.p);
    }
};

/// Dense table of a function on {0,1}^n; entry m is f at the point whose
/// ones are exactly the bits of m.
template <class T>
class BasicTruthTable {
   public:
    BasicTruthTable() = default;
    BasicTruthTable(int n, std::vector<T> values) : n_(n), values_(std::move(values)) {
        if (n < 0 || n > kDenseCap) {
            throw std::invalid_argument("truth table dimension out of range: " + std::to_string(n));
        }
        if (values_.size() != (std::size_t{1} << n)) {
            throw std::invalid_argument("truth table must have exactly 2^n entries");
        }
        if constexpr (std::is_floating_point_v<T>) {
            for (const T &v : values_) {
                if (!std::isfinite(v)) {
                    throw std::invalid_argument("truth table values must be finite");
                }
            }
        }
    }

    static BasicTruthTable constant(int n, T c) {
        return BasicTruthTable(n, std::vector<T>(std::size_t{1} << n, c));
    }
    template <class Fn>
    static BasicTruthTable generate(int n, Fn &&fn) {
        std::vector<T> v(std::size_t{1} << n);
        for (std::size_t m = 0; m < v.size(); ++m) {
            v[m] = fn(static_cast<Mask>(m));
        }
        return BasicTruthTable(n, std::move(v));
    }

    int n() const {
        return n_;
    }
    std::size_t size() const {
        return values_.size();
    }
    const T &operator[](Mask m) const {
        return values_[m];
    }
    std::span<const T> values() const {
        return values_;
    }
    friend bool operator==(const BasicTruthTable &, const BasicTruthTable &) = default;

   private:
    int n_ = 0;
    std::vector<T> values_{T{}};
};

using TruthTable = BasicTruthTable<double>;
using DyadicTable = BasicTruthTable<Dyadic>;

template <class Fn>
TruthTable transform(const TruthTable &tt, Fn &&fn) {
    return TruthTable::generate(tt.n(), [&](Mask m) { return fn(tt[m]); });
}

template <class Fn>
TruthTable combine(const TruthTable &a, const TruthTable &b, Fn &&fn) {
    if (a.n() != b.n()) {
        throw std::invalid_argument("dimension mismatch");
    }
    return TruthTable::generate(a.n(), [&](Mask m) { return fn(a[m], b[m]); });
}

/// Sparse multilinear polynomial, keyed by monomial index set, in either the
/// y basis (y_S = prod y_i) or the orthonormal p-biased Fourier basis.
template <class T>
class BasicSubsetPoly {
   public:
    using Coeffs = std::map<Mask, T>;

    BasicSubsetPoly() = default;
    explicit BasicSubsetPoly(int n, Basis basis = Basis::y()) : n_(n), basis_(basis) {
        if (n < 0 || n > kMaxVars) {
            throw std::invalid_argument("polynomial dimension out of range: " + std::to_string(n));
        }
    }

    int n() const {
        return n_;
    }
    const Basis &basis() const {
        return basis_;
    }
    const Coeffs &coeffs() const {
        return coeffs_;
    }
    std::size_t size() const {
        return coeffs_.size();
    }
    bool empty() const {
        return coeffs_.empty();
    }

    T coeff(Mask key) const {
        auto it = coeffs_.find(key);
        return it == coeffs_.end() ? T{} : it->second;
    }

    void set(Mask key, T c) {
        check_key(key);
        if (is_negligible(c)) {
            coeffs_.erase(key);
        } else {
            coeffs_[key] = c;
        }
    }
    void add(Mask key, T c) {
        set(key, coeff(key) + c);
    }

    /// Largest monomial size; 0 for the zero polynomial.
    int degree() const {
        int d = 0;
        for (const auto &[key, c] : coeffs_) {
            d = std::max(d, popcount(key));
        }
        return d;
    }
    /// Union of all monomials: the coordinates the function depends on.
    Mask variables() const {
        Mask v = 0;
        for (const auto &[key, c] : coeffs_) {
            v |= key;
        }
        return v;
    }

    /// Value at the point with ones exactly at x.
    T operator()(Mask x) const {
        T total{};
        if (basis_.is_y()) {
            for (const auto &[key, c] : coeffs_) {
                if (is_subset(key, x)) {
                    total += c;
                }
            }
        } else {
            if constexpr (std::is_floating_point_v<T>) {
                double p = basis_.p;
                double sigma = std::sqrt(p * (1 - p));
                double on = (1 - p) / sigma;
                double off = -p / sigma;
                for (const auto &[key, c] : coeffs_) {
                    double term = c;
                    for (Mask m = key; m != 0; m &= m - 1) {
                        term *= (x & (m & (~m + 1))) ? on : off;
                    }
                    total += term;
                }
            } else {
                throw std::logic_error("Fourier evaluation requires floating point coefficients");
            }
        }
        return total;
    }

    friend bool operator==(const BasicSubsetPoly &, const BasicSubsetPoly &) = default;

   private:
    void check_key(Mask key) const {
        if (!is_subset(key, full_mask(n_))) {
            throw std::invalid_argument("monomial index outside ground set");
        }
    }

    int n_ = 0;
    Basis basis_{};
    Coeffs coeffs_;
};

using SubsetPoly = BasicSubsetPoly<double>;
using DyadicPoly = BasicSubsetPoly<Dyadic>;

template <class T>
BasicSubsetPoly<T> operator+(const BasicSubsetPoly<T> &a, const BasicSubsetPoly<T> &b) {
    if (a.n() != b.n() || !(a.basis() == b.basis())) {
        throw std::invalid_argument("polynomial addition needs matching dimension and basis");
    }
    BasicSubsetPoly<T> out = a;
    for (const auto &[key, c] : b.coeffs()) {
        out.add(key, c);
    }
    return out;
}

template <class T>
BasicSubsetPoly<T> operator-(const BasicSubsetPoly<T> &a, const BasicSubsetPoly<T> &b) {
    BasicSubsetPoly<T> neg(b.n(), b.basis());
    for (const auto &[key, c] : b.coeffs()) {
        neg.set(key, -c);
    }
    return a + neg;
}

/// Product of two y-basis polynomials, using y_i^2 = y_i.
inline SubsetPoly multiply(const SubsetPoly &a, const SubsetPoly &b) {
    if (!a.basis().is_y() || !b.basis().is_y() || a.n() != b.n()) {
        throw std::invalid_argument("multiply needs two y-basis polynomials of equal dimension");
    }
    std::map<Mask, double> acc;
    for (const auto &[ka, ca] : a.coeffs()) {
        for (const auto &[kb, cb] : b.coeffs()) {
            acc[ka | kb] += ca * cb;
        }
    }
    SubsetPoly out(a.n());
    for (const auto &[k, c] : acc) {
        out.set(k, c);
    }
    return out;
}

/// In place: a[m] <- sum over s ⊆ m of (-1)^|m \ s| a[s].
template <class T>
void moebius_inplace(std::span<T> a) {
    for (std::size_t bit = 1; bit < a.size(); bit <<= 1) {
        for (std::size_t m = 0; m < a.size(); ++m) {
            if (m & bit) {
                a[m] -= a[m ^ bit];
            }
        }
    }
}

/// In place: a[m] <- sum over s ⊆ m of a[s].
template <class T>
void zeta_inplace(std::span<T> a) {
    for (std::size_t bit = 1; bit < a.size(); bit <<= 1) {
        for (std::size_t m = 0; m < a.size(); ++m) {
            if (m & bit) {
                a[m] += a[m ^ bit];
            }
        }
    }
}

/// Unique multilinear (y-basis) coefficients of a table.
template <class T>
BasicSubsetPoly<T> y_expand(const BasicTruthTable<T> &tt) {
    std::vector<T> a(tt.values().begin(), tt.values().end());
    moebius_inplace<T>(a);
    BasicSubsetPoly<T> out(tt.n());
    for (std::size_t m = 0; m < a.size(); ++m) {
        if (!is_negligible(a[m])) {
            out.set(static_cast<Mask>(m), a[m]);
        }
    }
    return out;
}

/// Dense table of a y-basis polynomial.
template <class T>
BasicTruthTable<T> to_truth_table(const BasicSubsetPoly<T> &poly) {
    if (!poly.basis().is_y()) {
        throw std::invalid_argument("expected a y-basis polynomial");
    }
    if (poly.n() > kDenseCap) {
        throw CapExceeded("dimension " + std::to_string(poly.n()) + " exceeds the dense cap");
    }
    std::vector<T> a(std::size_t{1} << poly.n(), T{});
    for (const auto &[key, c] : poly.coeffs()) {
        a[key] = c;
    }
    zeta_inplace<T>(a);
    return BasicTruthTable<T>(poly.n(), std::move(a));
}

/// Coefficients in the orthonormal basis phi_S = prod (y_i - p) / sqrt(p(1-p)).
inline SubsetPoly fourier_expand(const TruthTable &tt, BiasedMeasure mu) {
    const double p = mu.p();
    const double sigma = std::sqrt(p * (1 - p));
    std::vector<double> a(tt.values().begin(), tt.values().end());
    for (std::size_t bit = 1; bit < a.size(); bit <<= 1) {
        for (std::size_t m = 0; m < a.size(); ++m) {
            if ((m & bit) == 0) {
                double lo = a[m];
                double hi = a[m | bit];
                a[m] = (1 - p) * lo + p * hi;
                a[m | bit] = sigma * (hi - lo);
            }
        }
    }
    SubsetPoly out(tt.n(), Basis::fourier(p));
    for (std::size_t m = 0; m < a.size(); ++m) {
        out.set(static_cast<Mask>(m), a[m]);
    }
    return out;
}

/// Dense table of a polynomial in either basis.
inline TruthTable to_truth_table(const SubsetPoly &poly) {
    if (poly.basis().is_y()) {
        return to_truth_table<double>(poly);
    }
    if (poly.n() > kDenseCap) {
        throw CapExceeded("dimension " + std::to_string(poly.n()) + " exceeds the dense cap");
    }
    const double p = poly.basis().p;
    const double sigma = std::sqrt(p * (1 - p));
    std::vector<double> a(std::size_t{1} << poly.n(), 0.0);
    for (const auto &[key, c] : poly.coeffs()) {
        a[key] = c;
    }
    for (std::size_t bit = 1; bit < a.size(); bit <<= 1) {
        for (std::size_t m = 0; m < a.size(); ++m) {
            if ((m & bit) == 0) {
                double c0 = a[m];
                double c1 = a[m | bit];
                a[m] = c0 - c1 * p / sigma;
                a[m | bit] = c0 + c1 * (1 - p) / sigma;
            }
        }
    }
    return TruthTable(poly.n(), std::move(a));
}

inline SubsetPoly to_y_basis(const SubsetPoly &poly) {
    return poly.basis().is_y() ? poly : y_expand(to_truth_table(poly));
}

inline SubsetPoly to_fourier(const SubsetPoly &poly, BiasedMeasure mu) {
    return fourier_expand(to_truth_table(poly), mu);
}

/// y-degree of the function (equal to its Fourier degree at every p).
inline int degree(const TruthTable &tt) {
    return y_expand(tt).degree();
}

/// f^{<=d} with respect to mu: drop Fourier levels above d.
inline TruthTable project_degree(const TruthTable &tt, int d, BiasedMeasure mu) {
    SubsetPoly fhat = fourier_expand(tt, mu);
    SubsetPoly low(tt.n(), fhat.basis());
    for (const auto &[key, c] : fhat.coeffs()) {
        if (popcount(key) <= d) {
            low.set(key, c);
        }
    }
    return to_truth_table(low);
}

/// Keeps the monomials inside `vars` and re-indexes them onto 0..|vars|-1.
template <class T>
BasicSubsetPoly<T> compress(const BasicSubsetPoly<T> &poly, Mask vars) {
    BasicSubsetPoly<T> out(popcount(vars), poly.basis());
    for (const auto &[key, c] : poly.coeffs()) {
        if (!is_subset(key, vars)) {
            throw std::invalid_argument("compress: monomial outside the given variables");
        }
        out.set(extract(key, vars), c);
    }
    return out;
}

/// Inverse of compress: places local variable j at the j-th set bit of `vars`.
template <class T>
BasicSubsetPoly<T> lift(const BasicSubsetPoly<T> &local, Mask vars, int n) {
    if (local.n() != popcount(vars) || !is_subset(vars, full_mask(n))) {
        throw std::invalid_argument("lift: variable set does not match");
    }
    BasicSubsetPoly<T> out(n, local.basis());
    for (const auto &[key, c] : local.coeffs()) {
        out.set(deposit(key, vars), c);
    }
    return out;
}

/// f|_S: zero substituted outside S, re-indexed onto S's coordinates.
template <class T>
BasicTruthTable<T> restrict_zero(const BasicTruthTable<T> &tt, IndexSubset s) {
    if (!s.within(tt.n())) {
        throw std::invalid_argument("restriction set outside ground set");
    }
    // Subsets of S in ascending order are exactly the deposits of 0, 1, 2, ...
    const Mask bits = s.bits();
    std::vector<T> values(std::size_t{1} << s.size());
    Mask global = 0;
    for (std::size_t local = 0; local < values.size(); ++local) {
        values[local] = tt[global];
        global = (global - bits) & bits;
    }
    return BasicTruthTable<T>(s.size(), std::move(values));
}

/// f|_S in the y basis: deletes every monomial not contained in S. Keeps the
/// original indexing.
template <class T>
BasicSubsetPoly<T> restrict_zero(const BasicSubsetPoly<T> &poly, IndexSubset s) {
    if (!poly.basis().is_y()) {
        throw std::invalid_argument("restriction by deletion needs the y basis");
    }
    BasicSubsetPoly<T> out(poly.n());
    for (const auto &[key, c] : poly.coeffs()) {
        if (is_subset(key, s.bits())) {
            out.set(key, c);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Expectations and norms.

namespace detail {

// Points on one level share a weight, so sum each level first and weight once.
// Integer-valued integrands then come out exact up to the final n+1 terms.
template <class Fn>
double level_sum(int n, std::size_t size, BiasedMeasure mu, Fn &&term) {
    const auto w = mu.level_weights(n);
    std::vector<double> by_level(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t m = 0; m < size; ++m) {
        by_level[static_cast<std::size_t>(popcount(m))] += term(m);
    }
    double total = 0;
    for (std::size_t k = 0; k < by_level.size(); ++k) {
        total += w[k] * by_level[k];
    }
    return total;
}

}  // namespace detail

/// E_mu[fn(f(x))] by exact weighted enumeration.
template <class Fn>
double expect_map(const TruthTable &tt, BiasedMeasure mu, Fn &&fn) {
    const double total = detail::level_sum(tt.n(), tt.size(), mu, [&](std::size_t m) { return fn(tt[m]); });
    if (!std::isfinite(total)) {
        throw Error("expectation overflowed");
    }
    return total;
}

inline double expectation(const TruthTable &tt, BiasedMeasure mu) {
    return expect_map(tt, mu, [](double v) { return v; });
}

/// E[f^k].
inline double moment(const TruthTable &tt, BiasedMeasure mu, int k) {
    return expect_map(tt, mu, [k](double v) { return std::pow(v, k); });
}

/// ||f||_2 = sqrt(E[f^2]).
inline double norm2(const TruthTable &tt, BiasedMeasure mu) {
    return std::sqrt(expect_map(tt, mu, [](double v) { return v * v; }));
}

/// ||f||_q = E[|f|^q]^(1/q), q >= 1.
inline double norm_q(const TruthTable &tt, BiasedMeasure mu, double q) {
    if (!(q >= 1)) {
        throw std::invalid_argument("norm_q needs q >= 1");
    }
    return std::pow(expect_map(tt, mu, [q](double v) { return std::pow(std::abs(v), q); }), 1.0 / q);
}

inline double variance(const TruthTable &tt, BiasedMeasure mu) {
    double mean = expectation(tt, mu);
    return expect_map(tt, mu, [mean](double v) { return (v - mean) * (v - mean); });
}

/// E[(f - g)^2].
inline double sq_distance(const TruthTable &f, const TruthTable &g, BiasedMeasure mu) {
    if (f.n() != g.n()) {
        throw std::invalid_argument("dimension mismatch");
    }
    return detail::level_sum(f.n(), f.size(), mu, [&](std::size_t m) {
        const double d = f[m] - g[m];
        return d * d;
    });
}

/// Sample budget for quantities whose exact evaluation exceeds the dense cap.
struct MonteCarloBudget {
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

/// A (possibly estimated) expectation.
struct Estimate {
    double value = 0;
    double std_error = 0;
    std::uint64_t samples = 0;
    bool exact = true;
};

/// The table of `poly` over its relevant variables only.
struct LocalTable {
    TruthTable table;
    Mask vars = 0;
};

inline LocalTable relevant_table(const SubsetPoly &poly, Mask extra_vars = 0) {
    Mask vars = poly.variables() | extra_vars;
    if (popcount(vars) > kDenseCap) {
        throw CapExceeded(std::to_string(popcount(vars)) + " relevant variables exceed the dense cap");
    }
    return {to_truth_table(compress(poly, vars)), vars};
}

/// E_mu[fn(g(x))] for a polynomial g: exact over its relevant variables when
/// they fit under the dense cap, otherwise Monte Carlo with the given budget.
template <class Fn>
Estimate expect_poly(const SubsetPoly &poly, BiasedMeasure mu, Fn &&fn,
                     const std::optional<MonteCarloBudget> &mc = std::nullopt) {
    const Mask vars = poly.variables();
    if (popcount(vars) <= kDenseCap) {
        LocalTable lt = relevant_table(poly);
        return {expect_map(lt.table, mu, fn), 0.0, 0, true};
    }
    if (!mc || mc->samples == 0) {
        throw CapExceeded(std::to_string(popcount(vars)) +
                          " relevant variables exceed the dense cap and no Monte Carlo budget was given");
    }
    Rng rng = stream_rng(mc->seed, 0);
    double mean = 0;
    double m2 = 0;
    for (std::uint64_t i = 0; i < mc->samples; ++i) {
        Mask x = 0;
        for (Mask v = vars; v != 0; v &= v - 1) {
            if (bernoulli(rng, mu.p())) {
                x |= v & (~v + 1);
            }
        }
        double val = fn(poly(x));
        double delta = val - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (val - mean);
    }
    double n = static_cast<double>(mc->samples);
    double var = mc->samples > 1 ? m2 / (n - 1) : 0.0;
    return {mean, std::sqrt(var / n), mc->samples, false};
}

// ---------------------------------------------------------------------------
// Samplers.

inline IndexSubset sample_mu_p(int n, BiasedMeasure mu, Rng &rng) {
    Mask m = 0;
    for (int i = 0; i < n; ++i) {
        if (bernoulli(rng, mu.p())) {
            m |= Mask{1} << i;
        }
    }
    return IndexSubset(m);
}

/// S ~ mu_p conditioned on forced ⊆ S.
inline IndexSubset sample_containing(int n, IndexSubset forced, BiasedMeasure mu, Rng &rng) {
    Mask m = forced.bits();
    for (int i = 0; i < n; ++i) {
        if (!forced.contains(i) && bernoulli(rng, mu.p())) {
            m |= Mask{1} << i;
        }
    }
    return IndexSubset(m);
}

/// (S1, S2) ~ mu_{p,q}: each element independently lands in both sets with
/// probability pq, in exactly one given set with probability p(1-q) each.
inline std::pair<IndexSubset, IndexSubset> sample_mu_pq(int n, double p, double q, Rng &rng) {
    if (!(p > 0 && p < 1) || !(q >= 0 && q <= 1) || 2 * p - p * q > 1 + 1e-15) {
        throw std::invalid_argument("mu_{p,q} needs 0<p<1, 0<=q<=1 and 2p - pq <= 1");
    }
    const double both = p * q;
    const double only = p * (1 - q);
    Mask s1 = 0;
    Mask s2 = 0;
    for (int i = 0; i < n; ++i) {
        double u = uniform01(rng);
        Mask bit = Mask{1} << i;
        if (u < both) {
            s1 |= bit;
            s2 |= bit;
        } else if (u < both + only) {
            s1 |= bit;
        } else if (u < both + 2 * only) {
            s2 |= bit;
        }
    }
    return {IndexSubset(s1), IndexSubset(s2)};
}

}  // namespace bfnlab
