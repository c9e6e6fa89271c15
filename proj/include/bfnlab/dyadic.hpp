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
#include <optional>
#include <string>
#include <string_view>

#include "bfnlab/bits.hpp"

namespace bfnlab {

/// Exact dyadic rational num / 2^exp with a 64-bit numerator.
///
/// Normalized so that exp == 0 or num is odd; equality is therefore
/// structural. Arithmetic that leaves the representable range throws
/// `Error` instead of rounding.
class Dyadic {
   public:
    static constexpr int kMaxExp = 62;

    constexpr Dyadic() = default;
    constexpr Dyadic(std::int64_t v) : num_(v) {  // NOLINT(implicit)
    }

    static Dyadic from_parts(std::int64_t num, int exp) {
        if (exp < 0 || exp > kMaxExp) {
            throw Error("dyadic exponent out of range");
        }
        return normalized(num, exp);
    }

    /// Exact conversion; nullopt if x is not representable.
    static std::optional<Dyadic> from_double(double x) {
        if (!std::isfinite(x)) {
            return std::nullopt;
        }
        if (x == 0) {
            return Dyadic();
        }
        int e = 0;
        double frac = std::frexp(x, &e);  // x = frac * 2^e, 0.5 <= |frac| < 1
        auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
        int exp = 53 - e;
        while (exp > 0 && (mant & 1) == 0) {
            mant >>= 1;
            --exp;
        }
        while (exp < 0) {
            if (mant > (INT64_MAX >> 1) || mant < (INT64_MIN >> 1)) {
                return std::nullopt;
            }
            mant <<= 1;
            ++exp;
        }
        if (exp > kMaxExp) {
            return std::nullopt;
        }
        return Dyadic(mant, exp, 0);
    }

    constexpr std::int64_t numerator() const {
        return num_;
    }
    constexpr int exponent() const {
        return exp_;
    }
    double to_double() const {
        return std::ldexp(static_cast<double>(num_), -exp_);
    }
    bool is_zero() const {
        return num_ == 0;
    }

    friend Dyadic operator+(Dyadic a, Dyadic b) {
        int e = std::max(a.exp_, b.exp_);
        Int128 x = static_cast<Int128>(a.num_) << (e - a.exp_);
        Int128 y = static_cast<Int128>(b.num_) << (e - b.exp_);
        return from_wide(x + y, e);
    }
    friend Dyadic operator-(Dyadic a) {
        if (a.num_ == INT64_MIN) {
            throw Error("dyadic overflow");
        }
        return Dyadic(-a.num_, a.exp_, 0);
    }
    friend Dyadic operator-(Dyadic a, Dyadic b) {
        return a + (-b);
    }
    friend Dyadic operator*(Dyadic a, Dyadic b) {
        int e = a.exp_ + b.exp_;
        Int128 x = static_cast<Int128>(a.num_) * b.num_;
        while (e > kMaxExp && (x & 1) == 0) {
            x >>= 1;
            --e;
        }
        if (e > kMaxExp) {
            throw Error("dyadic exponent overflow");
        }
        return from_wide(x, e);
    }
    Dyadic &operator+=(Dyadic o) {
        return *this = *this + o;
    }
    Dyadic &operator-=(Dyadic o) {
        return *this = *this - o;
    }
    friend bool operator==(Dyadic, Dyadic) = default;

    /// Exact decimal expansion (every dyadic rational has a finite one).
    std::string to_decimal() const {
        // num / 2^k == num * 5^k / 10^k
        unsigned long long magnitude =
            num_ < 0 ? 0ULL - static_cast<unsigned long long>(num_) : static_cast<unsigned long long>(num_);
        std::string digits = std::to_string(magnitude);
        for (int i = 0; i < exp_; ++i) {
            int carry = 0;
            for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
                int v = (*it - '0') * 5 + carry;
                *it = static_cast<char>('0' + v % 10);
                carry = v / 10;
            }
            while (carry > 0) {
                digits.insert(digits.begin(), static_cast<char>('0' + carry % 10));
                carry /= 10;
            }
        }
        std::string out;
        if (exp_ == 0) {
            out = digits;
        } else {
            if (static_cast<int>(digits.size()) <= exp_) {
                digits.insert(0, static_cast<std::size_t>(exp_ + 1) - digits.size(), '0');
            }
            out = digits.substr(0, digits.size() - exp_) + "." + digits.substr(digits.size() - exp_);
        }
        return num_ < 0 ? "-" + out : out;
    }

    /// Parses a plain decimal ("-12.375"). Throws if the value is not dyadic
    /// or does not fit.
    static Dyadic parse_decimal(std::string_view text) {
        bool negative = false;
        std::size_t pos = 0;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
            negative = text[pos] == '-';
            ++pos;
        }
        std::string digits;
        int frac_digits = 0;
        bool seen_point = false;
        for (; pos < text.size(); ++pos) {
            char c = text[pos];
            if (c == '.' && !seen_point) {
                seen_point = true;
            } else if (c >= '0' && c <= '9') {
                digits.push_back(c);
                if (seen_point) {
                    ++frac_digits;
                }
            } else {
                throw Error("not a decimal number: " + std::string(text));
            }
        }
        if (digits.empty()) {
            throw Error("not a decimal number: " + std::string(text));
        }
        // digits / 10^k: divide by 5^k exactly, leaving digits' / 2^k.
        for (int i = 0; i < frac_digits; ++i) {
            std::string q;
            int rem = 0;
            for (char c : digits) {
                int v = rem * 10 + (c - '0');
                q.push_back(static_cast<char>('0' + v / 5));
                rem = v % 5;
            }
            if (rem != 0) {
                throw Error("decimal is not a dyadic rational: " + std::string(text));
            }
            digits = q;
        }
        std::size_t first = digits.find_first_not_of('0');
        digits = first == std::string::npos ? "0" : digits.substr(first);
        if (digits.size() > 19) {
            throw Error("dyadic numerator overflow: " + std::string(text));
        }
        unsigned long long v = std::stoull(digits);
        if (v > static_cast<unsigned long long>(INT64_MAX)) {
            throw Error("dyadic numerator overflow: " + std::string(text));
        }
        auto num = static_cast<std::int64_t>(v);
        if (frac_digits > kMaxExp) {
            throw Error("dyadic exponent overflow: " + std::string(text));
        }
        return normalized(negative ? -num : num, frac_digits);
    }

   private:
    constexpr Dyadic(std::int64_t num, int exp, int) : num_(num), exp_(exp) {
    }

    static Dyadic normalized(std::int64_t num, int exp) {
        if (num == 0) {
            return Dyadic();
        }
        while (exp > 0 && (num & 1) == 0) {
            num /= 2;
            --exp;
        }
        return Dyadic(num, exp, 0);
    }

    static Dyadic from_wide(Int128 x, int e) {
        if (x == 0) {
            return Dyadic();
        }
        while (e > 0 && (x & 1) == 0) {
            x >>= 1;
            --e;
        }
        if (x > INT64_MAX || x < INT64_MIN) {
            throw Error("dyadic numerator overflow");
        }
        return Dyadic(static_cast<std::int64_t>(x), e, 0);
    }

    std::int64_t num_ = 0;
    int exp_ = 0;
};

}  // namespace bfnlab
