#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "iwasawa/error.hpp"

namespace iwasawa {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Sentinel for "valuation of zero" inside a ring Z/p^N.
inline constexpr int kInfiniteValuation = std::numeric_limits<int>::max();

bool is_prime(u64 n);

// p^e as an exact 64-bit integer; throws BudgetError on overflow.
u64 checked_pow(u64 p, int e);

// The chain ring Z/p^N. Residues are kept canonical in [0, p^N).
class Modulus {
public:
    Modulus(u64 p, int N);

    u64 p() const { return p_; }
    int precision() const { return N_; }
    u64 value() const { return pN_; }

    u64 reduce(i64 x) const
    {
        i64 m = static_cast<i64>(pN_);
        i64 r = x % m;
        return static_cast<u64>(r < 0 ? r + m : r);
    }
    u64 reduce_u(u64 x) const { return x % pN_; }

    u64 add(u64 a, u64 b) const
    {
        u64 s = a + b;
        return s >= pN_ ? s - pN_ : s;
    }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + pN_ - b; }
    u64 neg(u64 a) const { return a == 0 ? 0 : pN_ - a; }
    u64 mul(u64 a, u64 b) const
    {
        return static_cast<u64>((static_cast<u128>(a) * b) % pN_);
    }
    u64 pow(u64 a, u64 e) const;

    // v_p of a residue; kInfiniteValuation for 0.
    int val(u64 a) const;

    // Inverse of a unit residue (throws ValidationError on non-units).
    u64 inv(u64 a) const;

    // p^k reduced into the ring (0 once k >= N).
    u64 p_power(int k) const { return k >= N_ ? 0 : pows_[static_cast<std::size_t>(k)]; }

    // a / p^k for a residue known to be divisible by p^k; the result is only
    // meaningful modulo p^(N-k).
    u64 exact_div_p(u64 a, int k) const;

    bool operator==(const Modulus& o) const { return p_ == o.p_ && N_ == o.N_; }

private:
    u64 p_;
    int N_;
    u64 pN_;
    std::vector<u64> pows_;
};

} // namespace iwasawa
