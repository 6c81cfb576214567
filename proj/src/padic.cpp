#include "iwasawa/padic.hpp"

#include <algorithm>
#include <sstream>

namespace iwasawa {

namespace {

Modulus ring(u64 p, int prec) { return Modulus(p, prec); }

} // namespace

PadicScalar::PadicScalar(u64 p, int prec, i64 value)
    : PadicScalar(p, prec, ring(p, prec).reduce(value), true)
{
}

PadicScalar::PadicScalar(u64 p, int prec, u64 residue, bool) : p_(p), prec_(prec), residue_(residue)
{
    if (residue_ != 0) {
        int v = 0;
        u64 r = residue_;
        while (r % p_ == 0) {
            r /= p_;
            ++v;
        }
        val_ = v;
    }
}

PadicScalar PadicScalar::from_residue(u64 p, int prec, u64 residue)
{
    Modulus m(p, prec);
    return PadicScalar(p, prec, m.reduce_u(residue), true);
}

int PadicScalar::common_prec(const PadicScalar& a, const PadicScalar& b)
{
    if (a.p_ != b.p_)
        throw ValidationError("p-adic operands with different primes");
    return std::min(a.prec_, b.prec_);
}

PadicScalar PadicScalar::with_prec(int prec) const
{
    if (prec > prec_)
        throw PrecisionError("cannot raise precision of a p-adic scalar");
    return from_residue(p_, prec, residue_);
}

PadicScalar PadicScalar::operator-() const
{
    Modulus m(p_, prec_);
    return PadicScalar(p_, prec_, m.neg(residue_), true);
}

PadicScalar operator+(const PadicScalar& a, const PadicScalar& b)
{
    int n = PadicScalar::common_prec(a, b);
    Modulus m(a.p_, n);
    return PadicScalar(a.p_, n, m.add(m.reduce_u(a.residue_), m.reduce_u(b.residue_)), true);
}

PadicScalar operator-(const PadicScalar& a, const PadicScalar& b)
{
    int n = PadicScalar::common_prec(a, b);
    Modulus m(a.p_, n);
    return PadicScalar(a.p_, n, m.sub(m.reduce_u(a.residue_), m.reduce_u(b.residue_)), true);
}

PadicScalar operator*(const PadicScalar& a, const PadicScalar& b)
{
    int n = PadicScalar::common_prec(a, b);
    Modulus m(a.p_, n);
    return PadicScalar(a.p_, n, m.mul(m.reduce_u(a.residue_), m.reduce_u(b.residue_)), true);
}

PadicScalar PadicScalar::inverse() const
{
    Modulus m(p_, prec_);
    return PadicScalar(p_, prec_, m.inv(residue_), true);
}

PadicScalar PadicScalar::divide_by_p_power(int k) const
{
    if (k == 0)
        return *this;
    if (k >= prec_)
        throw PrecisionError("division by p^k exhausts all digits");
    Modulus m(p_, prec_);
    u64 q = m.exact_div_p(residue_, k);
    return from_residue(p_, prec_ - k, q);
}

std::string PadicScalar::to_string() const
{
    std::ostringstream os;
    os << residue_ << " mod " << p_ << "^" << prec_;
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const PadicScalar& x) { return os << x.to_string(); }

int vp(i64 k, u64 p)
{
    if (k == 0)
        throw ValidationError("valuation of zero");
    u64 a = k < 0 ? static_cast<u64>(-(k + 1)) + 1 : static_cast<u64>(k);
    int v = 0;
    while (a % p == 0) {
        a /= p;
        ++v;
    }
    return v;
}

u64 digit_sum(u64 k, u64 p)
{
    u64 s = 0;
    while (k) {
        s += k % p;
        k /= p;
    }
    return s;
}

u64 legendre_factorial_val(u64 k, u64 p) { return (k - digit_sum(k, p)) / (p - 1); }

int vp_binom_prime_power(int m, u64 k, u64 p)
{
    u64 pm = checked_pow(p, m);
    if (k < 1 || k >= pm)
        throw ValidationError("vp_binom_prime_power: k must satisfy 1 <= k < p^m");
    // i is maximal with a_{m-i} != 0, i.e. m - i is the lowest nonzero digit.
    int lowest = 0;
    while (k % p == 0) {
        k /= p;
        ++lowest;
    }
    return m - lowest;
}

PadicScalar binom_padic(const PadicScalar& beta, u64 alpha)
{
    const u64 p = beta.p();
    const int prec = beta.prec();
    const int loss = static_cast<int>(legendre_factorial_val(alpha, p));
    if (prec <= loss)
        throw PrecisionError("binom_padic: precision " + std::to_string(prec) +
                             " cannot absorb division by alpha! (loss " + std::to_string(loss) + ")");
    const int out_prec = prec - loss;
    if (alpha == 0)
        return PadicScalar::one(p, out_prec);

    Modulus m(p, prec);
    // Product of (beta - j) split into p-power and unit part.
    long total_val = 0;
    u64 unit = 1;
    for (u64 j = 0; j < alpha; ++j) {
        u64 factor = m.sub(beta.residue(), m.reduce_u(j));
        if (factor == 0)
            return PadicScalar::zero(p, out_prec);
        int v = m.val(factor);
        total_val += v;
        unit = m.mul(unit, factor / checked_pow(p, v));
    }
    // Unit part of alpha!.
    u64 fact_unit = 1;
    for (u64 j = 2; j <= alpha; ++j) {
        u64 x = j;
        while (x % p == 0)
            x /= p;
        fact_unit = m.mul(fact_unit, m.reduce_u(x));
    }
    long shift = total_val - loss;
    if (shift >= out_prec)
        return PadicScalar::zero(p, out_prec);
    Modulus out(p, out_prec);
    u64 r = out.mul(out.reduce_u(unit), out.inv(out.reduce_u(fact_unit)));
    r = out.mul(r, out.p_power(static_cast<int>(shift)));
    return PadicScalar::from_residue(p, out_prec, r);
}

PadicScalar idempotent_power(const PadicScalar& beta, int n, int f)
{
    if (n < 0 || f < 1)
        throw ValidationError("idempotent_power: need n >= 0 and f >= 1");
    if (beta.prec() < n + 1)
        throw PrecisionError("idempotent_power: beta.prec must be at least n+1");
    const u64 p = beta.p();
    Modulus m(p, n + 1);
    u64 e = checked_pow(p, n) * (checked_pow(p, f) - 1);
    return PadicScalar::from_residue(p, n + 1, m.pow(m.reduce_u(beta.residue()), e));
}

u64 binom_mod(u64 beta, u64 alpha, const Modulus& mod)
{
    if (alpha > beta)
        return 0;
    const int loss = static_cast<int>(legendre_factorial_val(alpha, mod.p()));
    PadicScalar b = PadicScalar::from_residue(mod.p(), mod.precision() + loss, beta);
    return binom_padic(b, alpha).residue();
}

} // namespace iwasawa
