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

#include <bit>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfnlab {

/// Bitmask over the ground set: bit i set <=> coordinate i is in the set.
using Mask = std::uint64_t;

// Wide intermediate for exact products and shifts. GCC and Clang both have it.
__extension__ using Int128 = __int128;

inline constexpr int kMaxVars = 63;

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An exact computation was requested beyond the dense-enumeration cap.
struct CapExceeded : Error {
    using Error::Error;
};

/// An exhaustive search would exceed its configured budget.
struct BudgetExceeded : Error {
    using Error::Error;
};

inline int popcount(Mask m) {
    return std::popcount(m);
}

inline bool is_subset(Mask a, Mask b) {
    return (a & ~b) == 0;
}

inline Mask full_mask(int n) {
    return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}

/// Scatters the low bits of `local` onto the set bits of `support` (like BMI2 pdep).
inline Mask deposit(Mask local, Mask support) {
    Mask out = 0;
    while (support != 0 && local != 0) {
        Mask low = support & (~support + 1);
        if (local & 1) {
            out |= low;
        }
        local >>= 1;
        support &= support - 1;
    }
    return out;
}

/// Gathers the bits of `global` at the positions of `support` into the low bits (like pext).
inline Mask extract(Mask global, Mask support) {
    Mask out = 0;
    int k = 0;
    while (support != 0) {
        Mask low = support & (~support + 1);
        if (global & low) {
            out |= Mask{1} << k;
        }
        ++k;
        support &= support - 1;
    }
    return out;
}

/// Calls fn(s) for every s ⊆ m in ascending numeric order.
template <class Fn>
void for_each_subset(Mask m, Fn &&fn) {
    Mask s = 0;
    while (true) {
        fn(s);
        if (s == m) {
            break;
        }
        s = (s - m) & m;
    }
}

/// Calls fn(s) for every k-element subset of {0..n-1}, ascending.
template <class Fn>
void for_each_combination(int n, int k, Fn &&fn) {
    if (k < 0 || k > n) {
        return;
    }
    if (k == 0) {
        fn(Mask{0});
        return;
    }
    Mask s = full_mask(k);
    const Mask limit = Mask{1} << n;
    while (s < limit) {
        fn(s);
        Mask c = s & (~s + 1);
        Mask r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
}

/// A subset of the ground set {0, ..., 62}.
///
/// Stored as a bitmask; the sorted index list form is available through
/// `indices()` / `from_indices()` and is what file formats use.
class IndexSubset {
   public:
    constexpr IndexSubset() = default;
    constexpr explicit IndexSubset(Mask bits) : bits_(bits) {
    }

    static IndexSubset from_indices(std::span<const int> indices) {
        Mask m = 0;
        for (int i : indices) {
            if (i < 0 || i >= kMaxVars) {
                throw std::invalid_argument("index out of range: " + std::to_string(i));
            }
            m |= Mask{1} << i;
        }
        return IndexSubset(m);
    }
    static IndexSubset from_indices(std::initializer_list<int> indices) {
        return from_indices(std::span<const int>(indices.begin(), indices.size()));
    }
    static IndexSubset range(int n) {
        return IndexSubset(full_mask(n));
    }

    constexpr Mask bits() const {
        return bits_;
    }
    int size() const {
        return popcount(bits_);
    }
    bool empty() const {
        return bits_ == 0;
    }
    bool contains(int i) const {
        return i >= 0 && i < 64 && ((bits_ >> i) & 1) != 0;
    }
    bool subset_of(IndexSubset other) const {
        return is_subset(bits_, other.bits_);
    }
    /// True iff every index is below n.
    bool within(int n) const {
        return is_subset(bits_, full_mask(n));
    }

    std::vector<int> indices() const {
        std::vector<int> out;
        for (Mask m = bits_; m != 0; m &= m - 1) {
            out.push_back(std::countr_zero(m));
        }
        return out;
    }

    friend IndexSubset operator|(IndexSubset a, IndexSubset b) {
        return IndexSubset(a.bits_ | b.bits_);
    }
    friend IndexSubset operator&(IndexSubset a, IndexSubset b) {
        return IndexSubset(a.bits_ & b.bits_);
    }
    friend IndexSubset operator-(IndexSubset a, IndexSubset b) {
        return IndexSubset(a.bits_ & ~b.bits_);
    }
    friend constexpr auto operator<=>(IndexSubset, IndexSubset) = default;

   private:
    Mask bits_ = 0;
};

}  // namespace bfnlab
