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
#include <initializer_list>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bfnlab/cube.hpp"

namespace bfnlab {

/// A finite, sorted set of reals. Values closer than kZeroThreshold are
/// merged on construction (the smaller one is kept).
class ValueSet {
   public:
    ValueSet(std::initializer_list<double> values) : ValueSet(std::vector<double>(values)) {
    }
    explicit ValueSet(std::vector<double> values) {
        if (values.empty()) {
            throw std::invalid_argument("value set must be nonempty");
        }
        for (double v : values) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("value set entries must be finite");
            }
        }
        std::sort(values.begin(), values.end());
        for (double v : values) {
            if (values_.empty() || v - values_.back() >= kZeroThreshold) {
                values_.push_back(v);
            }
        }
    }

    std::size_t size() const {
        return values_.size();
    }
    double operator[](std::size_t i) const {
        return values_[i];
    }
    const std::vector<double> &values() const {
        return values_;
    }
    auto begin() const {
        return values_.begin();
    }
    auto end() const {
        return values_.end();
    }
    double min() const {
        return values_.front();
    }
    double max() const {
        return values_.back();
    }

    /// Smallest gap between neighbours; infinity for a singleton.
    double min_gap() const {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < values_.size(); ++i) {
            gap = std::min(gap, values_[i] - values_[i - 1]);
        }
        return gap;
    }

    /// Index of the nearest element, ties toward the smaller one.
    std::size_t nearest_index(double x) const {
        if (std::isnan(x)) {
            throw std::invalid_argument("cannot round NaN");
        }
        auto it = std::lower_bound(values_.begin(), values_.end(), x);
        if (it == values_.begin()) {
            return 0;
        }
        if (it == values_.end()) {
            return values_.size() - 1;
        }
        std::size_t hi = static_cast<std::size_t>(it - values_.begin());
        std::size_t lo = hi - 1;
        return (x - values_[lo] <= values_[hi] - x) ? lo : hi;
    }

    bool contains(double x, double tol) const {
        return std::abs(x - values_[nearest_index(x)]) <= tol;
    }

    /// Quantization tolerance used when none is given.
    double default_tolerance() const {
        double gap = min_gap();
        return std::isfinite(gap) ? gap / 4 : 0.25;
    }

    friend bool operator==(const ValueSet &, const ValueSet &) = default;

   private:
    std::vector<double> values_;
};

inline double round_to(double x, const ValueSet &a) {
    return a[a.nearest_index(x)];
}

inline double dist(double x, const ValueSet &a) {
    return std::abs(x - round_to(x, a));
}

/// Pointwise rounding of a table.
inline TruthTable round_to(const TruthTable &tt, const ValueSet &a) {
    return transform(tt, [&](double v) { return round_to(v, a); });
}

/// E_mu[dist(f, A)^2], exact.
inline double expected_sq_dist(const TruthTable &tt, const ValueSet &a, BiasedMeasure mu) {
    return expect_map(tt, mu, [&](double v) {
        double d = dist(v, a);
        return d * d;
    });
}

/// E_mu[dist(f, A)^2] for a polynomial; exact over its relevant variables when
/// possible, otherwise Monte Carlo under `mc`.
inline Estimate expected_sq_dist(const SubsetPoly &poly, const ValueSet &a, BiasedMeasure mu,
                                 const std::optional<MonteCarloBudget> &mc = std::nullopt) {
    return expect_poly(
        poly, mu,
        [&](double v) {
            double d = dist(v, a);
            return d * d;
        },
        mc);
}

/// True iff every y-coefficient lies within tol of A'. A negative tol selects
/// the set's default tolerance.
inline bool is_quantized(const SubsetPoly &poly, const ValueSet &a, double tol = -1) {
    if (!poly.basis().is_y()) {
        throw std::invalid_argument("is_quantized expects a y-basis polynomial");
    }
    if (tol < 0) {
        tol = a.default_tolerance();
    }
    for (const auto &[key, c] : poly.coeffs()) {
        if (!a.contains(c, tol)) {
            return false;
        }
    }
    return true;
}

/// True iff every table entry lies within tol of A.
inline bool is_valued_in(const TruthTable &tt, const ValueSet &a, double tol = kZeroThreshold) {
    for (double v : tt.values()) {
        if (!a.contains(v, tol)) {
            return false;
        }
    }
    return true;
}

inline ValueSet minkowski_sum(const ValueSet &a, const ValueSet &b) {
    std::vector<double> out;
    out.reserve(a.size() * b.size());
    for (double x : a) {
        for (double y : b) {
            out.push_back(x + y);
        }
    }
    return ValueSet(std::move(out));
}

inline ValueSet minkowski_diff(const ValueSet &a, const ValueSet &b) {
    std::vector<double> out;
    out.reserve(a.size() * b.size());
    for (double x : a) {
        for (double y : b) {
            out.push_back(x - y);
        }
    }
    return ValueSet(std::move(out));
}

}  // namespace bfnlab
