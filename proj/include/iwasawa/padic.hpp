#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "iwasawa/modular.hpp"

namespace iwasawa {

// A p-adic integer known modulo p^prec. The valuation is cached; an empty
// valuation means the residue is 0, i.e. the value is >= prec.
class PadicScalar {
public:
    PadicScalar(u64 p, int prec, i64 value);

    static PadicScalar from_residue(u64 p, int prec, u64 residue);
    static PadicScalar zero(u64 p, int prec) { return from_residue(p, prec, 0); }
    static PadicScalar one(u64 p, int prec) { return from_residue(p, prec, 1); }

    u64 p() const { return p_; }
    int prec() const { return prec_; }
    u64 residue() const { return residue_; }
    std::optional<int> val() const { return val_; }
    bool is_zero() const { return residue_ == 0; }
    bool is_unit() const { return val_ && *val_ == 0; }

    // Reduce to a smaller precision.
    PadicScalar with_prec(int prec) const;

    PadicScalar operator-() const;
    friend PadicScalar operator+(const PadicScalar& a, const PadicScalar& b);
    friend PadicScalar operator-(const PadicScalar& a, const PadicScalar& b);
    friend PadicScalar operator*(const PadicScalar& a, const PadicScalar& b);
    friend bool operator==(const PadicScalar& a, const PadicScalar& b)
    {
        return a.p_ == b.p_ && a.prec_ == b.prec_ && a.residue_ == b.residue_;
    }

    // Inverse of a unit at full precision.
    PadicScalar inverse() const;

    // x / p^k; the result is known to precision prec - k.
    PadicScalar divide_by_p_power(int k) const;

    std::string to_string() const;

private:
    PadicScalar(u64 p, int prec, u64 residue, bool);
    static int common_prec(const PadicScalar& a, const PadicScalar& b);

    u64 p_;
    int prec_;
    u64 residue_;
    std::optional<int> val_;
};

std::ostream& operator<<(std::ostream& os, const PadicScalar& x);

// Exact p-adic valuation of a nonzero integer.
int vp(i64 k, u64 p);

// Sum of all base-p digits of k.
u64 digit_sum(u64 k, u64 p);

// v_p(k!) through Legendre's formula (k - s(k)) / (p - 1).
u64 legendre_factorial_val(u64 k, u64 p);

// v_p(binom(p^m, k)) for 1 <= k < p^m in closed form: the number of base-p
// digit positions from the lowest nonzero digit of k up to position m-1.
int vp_binom_prime_power(int m, u64 k, u64 p);

// binom(beta, alpha) for a p-adic beta. Dividing by alpha! costs
// v_p(alpha!) digits, so the result has precision beta.prec - v_p(alpha!).
PadicScalar binom_padic(const PadicScalar& beta, u64 alpha);

// beta^(p^n (p^f - 1)) mod p^(n+1): 1 for units, 0 otherwise.
PadicScalar idempotent_power(const PadicScalar& beta, int n, int f = 1);

// Exact binomial coefficient of nonnegative integers reduced into Z/p^N.
u64 binom_mod(u64 beta, u64 alpha, const Modulus& mod);

} // namespace iwasawa
