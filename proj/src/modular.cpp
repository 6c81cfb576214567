#include "iwasawa/modular.hpp"

#include <string>

namespace iwasawa {

bool is_prime(u64 n)
{
    if (n < 2)
        return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

u64 checked_pow(u64 p, int e)
{
    u64 r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > std::numeric_limits<u64>::max() / p)
            throw BudgetError("p^" + std::to_string(e) + " overflows 64 bits");
        r *= p;
    }
    return r;
}

Modulus::Modulus(u64 p, int N) : p_(p), N_(N)
{
    if (!is_prime(p))
        throw ValidationError(std::to_string(p) + " is not prime");
    if (N < 1)
        throw ValidationError("precision must be positive");
    // Keep sums and the headroom of exact_div_p inside 63 bits.
    pN_ = checked_pow(p, N);
    if (pN_ > (u64{1} << 62))
        throw BudgetError("p^N exceeds 2^62");
    pows_.resize(static_cast<std::size_t>(N));
    u64 x = 1;
    for (int k = 0; k < N; ++k) {
        pows_[static_cast<std::size_t>(k)] = x;
        x *= p;
    }
}

u64 Modulus::pow(u64 a, u64 e) const
{
    u64 r = 1 % pN_;
    a %= pN_;
    while (e) {
        if (e & 1)
            r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

int Modulus::val(u64 a) const
{
    if (a == 0)
        return kInfiniteValuation;
    int v = 0;
    while (a % p_ == 0) {
        a /= p_;
        ++v;
    }
    return v;
}

u64 Modulus::inv(u64 a) const
{
    if (a % p_ == 0)
        throw ValidationError("inverse of a non-unit");
    // extended Euclid on signed 128-bit
    __int128 t = 0, newt = 1;
    __int128 r = pN_, newr = a;
    while (newr != 0) {
        __int128 q = r / newr;
        __int128 tmp = t - q * newt;
        t = newt;
        newt = tmp;
        tmp = r - q * newr;
        r = newr;
        newr = tmp;
    }
    if (t < 0)
        t += pN_;
    return static_cast<u64>(t);
}

u64 Modulus::exact_div_p(u64 a, int k) const
{
    if (k == 0)
        return a;
    u64 pk = checked_pow(p_, k);
    if (a % pk != 0)
        throw PrecisionError("residue not divisible by p^" + std::to_string(k));
    return a / pk;
}

} // namespace iwasawa
