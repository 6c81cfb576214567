#include <doctest.h>
#include <gmpxx.h>

#include <random>

#include "iwasawa/padic.hpp"

using namespace iwasawa;

namespace {

int mpz_vp(mpz_class z, unsigned long p)
{
    int v = 0;
    while (mpz_divisible_ui_p(z.get_mpz_t(), p)) {
        mpz_divexact_ui(z.get_mpz_t(), z.get_mpz_t(), p);
        ++v;
    }
    return v;
}

} // namespace

TEST_SUITE("padic")
{
    TEST_CASE("vp examples")
    {
        CHECK(vp(84, 3) == 1);
        CHECK(vp(1, 5) == 0);
        CHECK(vp(24, 2) == 3);
        CHECK(vp(-81, 3) == 4);
        CHECK_THROWS_AS(vp(0, 3), ValidationError);
    }

    TEST_CASE("digit sums and Legendre")
    {
        CHECK(digit_sum(3, 3) == 1);
        CHECK(digit_sum(4, 2) == 1);
        CHECK(digit_sum(24, 5) == 8);
        CHECK(legendre_factorial_val(4, 2) == 3);
        CHECK(legendre_factorial_val(0, 3) == 0);
        CHECK(legendre_factorial_val(9, 3) == 4);
    }

    TEST_CASE("Legendre against big factorials")
    {
        for (unsigned long p : {2ul, 3ul, 5ul, 7ul}) {
            mpz_class f = 1;
            long acc = 0; // v_p(k!) accumulated incrementally from vp(k)
            for (u64 k = 0; k <= 2000; ++k) {
                if (k > 0) {
                    f *= static_cast<unsigned long>(k);
                    acc += vp(static_cast<i64>(k), p);
                }
                REQUIRE(legendre_factorial_val(k, p) == static_cast<u64>(acc));
                if (k % 97 == 0)
                    REQUIRE(static_cast<u64>(mpz_vp(f, p)) == legendre_factorial_val(k, p));
            }
        }
    }

    TEST_CASE("binomials of prime powers")
    {
        CHECK(vp_binom_prime_power(2, 3, 3) == 1);
        CHECK(vp_binom_prime_power(3, 4, 2) == 1);
        CHECK(vp_binom_prime_power(1, 2, 5) == 1);
        CHECK_THROWS(vp_binom_prime_power(2, 0, 3));
        CHECK_THROWS(vp_binom_prime_power(2, 9, 3));
        for (unsigned long p : {2ul, 3ul, 5ul})
            for (int m = 1; checked_pow(p, m) <= 729; ++m) {
                unsigned long pm = static_cast<unsigned long>(checked_pow(p, m));
                mpz_class b;
                for (unsigned long k = 1; k < pm; ++k) {
                    mpz_bin_uiui(b.get_mpz_t(), pm, k);
                    REQUIRE(vp_binom_prime_power(m, k, p) == mpz_vp(b, p));
                }
            }
    }

    TEST_CASE("scalar arithmetic")
    {
        PadicScalar a(3, 4, 5), b(3, 2, 7);
        auto s = a + b;
        CHECK(s.prec() == 2);
        CHECK(s.residue() == 3);
        CHECK(*s.val() == 1);
        CHECK((a * a.inverse()).residue() == 1);
        CHECK(PadicScalar(3, 4, 0).val() == std::nullopt);
        CHECK(PadicScalar(3, 4, -1).residue() == 80);
        CHECK_THROWS(PadicScalar(3, 4, 1) + PadicScalar(5, 4, 1));
        CHECK_THROWS(PadicScalar(3, 4, 3).inverse());
        auto q = PadicScalar(3, 4, 18).divide_by_p_power(2);
        CHECK(q.prec() == 2);
        CHECK(q.residue() == 2);
    }

    TEST_CASE("binom_padic")
    {
        auto r = binom_padic(PadicScalar(3, 4, 5), 2);
        CHECK(r.prec() == 4);
        CHECK(r.residue() == 10);
        auto one = binom_padic(PadicScalar(3, 4, 17), 0);
        CHECK(one.residue() == 1);
        CHECK(one.prec() == 4);
        for (u64 a = 0; a < 18; ++a) {
            auto x = binom_padic(PadicScalar(3, 8, static_cast<i64>(a)), a);
            CHECK(x.residue() == 1);
            CHECK(x.prec() == 8 - static_cast<int>(legendre_factorial_val(a, 3)));
        }
        CHECK_THROWS_AS(binom_padic(PadicScalar(3, 2, 5), 6), PrecisionError);
    }

    TEST_CASE("binom_padic agrees with exact binomials of negative and large integers")
    {
        // binom(-1, a) = (-1)^a; binom(b, a) for 0 <= b < 200 against GMP.
        for (u64 a = 0; a < 12; ++a) {
            auto x = binom_padic(PadicScalar(5, 10, -1), a);
            Modulus m(5, x.prec());
            CHECK(x.residue() == (a % 2 ? m.neg(1) : 1));
        }
        for (unsigned long b = 0; b < 200; b += 7)
            for (unsigned long a = 0; a < 30; ++a) {
                auto x = binom_padic(PadicScalar(3, 16, static_cast<i64>(b)), a);
                mpz_class e;
                mpz_bin_uiui(e.get_mpz_t(), b, a);
                mpz_class m;
                mpz_ui_pow_ui(m.get_mpz_t(), 3, static_cast<unsigned long>(x.prec()));
                mpz_class r = e % m;
                REQUIRE(x.residue() == r.get_ui());
            }
    }

    TEST_CASE("binom_padic continuity and Pascal")
    {
        std::mt19937_64 rng(7);
        const u64 p = 3;
        for (int t = 0; t < 300; ++t) {
            i64 beta = static_cast<i64>(rng() % 100000);
            i64 shift = static_cast<i64>(rng() % 50) * 81; // beta' = beta mod 3^4
            u64 a = rng() % 12;
            auto x = binom_padic(PadicScalar(p, 10, beta), a);
            auto y = binom_padic(PadicScalar(p, 10, beta + shift), a);
            int agree = 4 - static_cast<int>(legendre_factorial_val(a, p));
            if (agree > 0)
                CHECK(x.with_prec(agree) == y.with_prec(agree));

            auto lhs = binom_padic(PadicScalar(p, 10, beta), a) + binom_padic(PadicScalar(p, 10, beta), a + 1);
            auto rhs = binom_padic(PadicScalar(p, 10, beta + 1), a + 1);
            int prec = std::min(lhs.prec(), rhs.prec());
            CHECK(lhs.with_prec(prec) == rhs.with_prec(prec));
        }
    }

    TEST_CASE("idempotent power")
    {
        CHECK(idempotent_power(PadicScalar(5, 3, 2), 2).residue() == 1);
        CHECK(idempotent_power(PadicScalar(5, 3, 5), 2).residue() == 0);
        CHECK(idempotent_power(PadicScalar(3, 2, 7), 1).residue() == 1);
        CHECK(idempotent_power(PadicScalar(3, 2, 7), 1).prec() == 2);
    }

    TEST_CASE("exact binomial mod p^N")
    {
        Modulus m(3, 4);
        CHECK(binom_mod(9, 3, m) == 84 % 81);
        CHECK(binom_mod(27, 9, m) == static_cast<u64>(4686825 % 81));
        CHECK(binom_mod(2, 5, m) == 0);
    }
}
