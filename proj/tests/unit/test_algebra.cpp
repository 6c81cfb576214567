#include <doctest.h>

#include <random>

#include "iwasawa/algebra.hpp"

using namespace iwasawa;

namespace {

AlgebraElement random_element(const QuotientPtr& q, const Modulus& mod, std::mt19937_64& rng, std::size_t terms)
{
    AlgebraElement x(q, mod);
    for (std::size_t t = 0; t < terms; ++t) {
        std::size_t g = rng() % q->order();
        x.set(g, mod.add(x.coeff(g), rng() % mod.value()));
    }
    return x;
}

// (a,b,c)(a',b',c') = (a+a', b+b', c+c'-a'b) for the Heisenberg chart.
Vec heis_mul(const Vec& x, const Vec& y, u64 side)
{
    auto m = [&](i64 v) { return static_cast<u64>(((v % static_cast<i64>(side)) + static_cast<i64>(side)) % static_cast<i64>(side)); };
    return {m(static_cast<i64>(x[0] + y[0])), m(static_cast<i64>(x[1] + y[1])),
            m(static_cast<i64>(x[2] + y[2]) - static_cast<i64>(y[0] * x[1]))};
}

} // namespace

TEST_SUITE("algebra")
{
    TEST_CASE("quotients")
    {
        auto c3 = QuotientGroup::build(GroupChart::zp(3), 1);
        CHECK(c3->order() == 3);
        CHECK(c3->mul(1, 2) == 0);
        CHECK(c3->fully_verified());

        for (int n : {1, 2}) {
            auto h = QuotientGroup::build(GroupChart::heisenberg(3), n);
            CHECK(h->order() == (n == 1 ? 27u : 729u));
            bool nonabelian = false;
            for (std::size_t a = 0; a < h->order(); ++a)
                for (std::size_t b = 0; b < h->order(); ++b) {
                    Vec expect = heis_mul(h->coords(a), h->coords(b), h->side());
                    REQUIRE(h->coords(h->mul(a, b)) == expect);
                    nonabelian = nonabelian || h->mul(a, b) != h->mul(b, a);
                }
            CHECK(nonabelian);
        }
        // Same products with no tables at all (matrix route).
        QuotientOptions none;
        none.table_budget = 0;
        none.generator_table_budget = 0;
        auto hm = QuotientGroup::build(GroupChart::heisenberg(3), 2, none);
        std::mt19937_64 rng(5);
        for (int t = 0; t < 100; ++t) {
            std::size_t a = rng() % 729, b = rng() % 729;
            CHECK(hm->coords(hm->mul(a, b)) == heis_mul(hm->coords(a), hm->coords(b), 9));
        }
        QuotientOptions small;
        small.size_budget = 100;
        CHECK_THROWS_AS(QuotientGroup::build(GroupChart::heisenberg(3), 2, small), BudgetError);
        CHECK_THROWS_AS(QuotientGroup::build(GroupChart::unitriangular(2, 4), 1), ValidationError);
    }

    TEST_CASE("convolution")
    {
        auto q = QuotientGroup::build(GroupChart::zp(3), 2);
        Modulus m(3, 3);
        auto b = AlgebraElement::b(q, m, 0);
        auto sq = b * b;
        CHECK(sq.coeff(2) == 1);
        CHECK(sq.coeff(1) == m.reduce(-2));
        CHECK(sq.coeff(0) == 1);
        std::mt19937_64 rng(9);
        auto x = random_element(q, m, rng, 5);
        CHECK(x * AlgebraElement::one(q, m) == x);

        auto h = QuotientGroup::build(GroupChart::heisenberg(3), 1);
        Modulus mh(3, 2);
        auto b1 = AlgebraElement::b(h, mh, 0), b2 = AlgebraElement::b(h, mh, 1);
        std::size_t g1 = h->generator(0), g2 = h->generator(1);
        auto expect = AlgebraElement::group(h, mh, h->mul(g1, g2)) - AlgebraElement::group(h, mh, h->mul(g2, g1));
        CHECK(b1 * b2 - b2 * b1 == expect);
        CHECK_FALSE(expect.is_zero());

        Vec a11{1, 1, 0};
        auto mono = b_monomial(h, mh, a11);
        auto supp = mono.support();
        std::vector<std::size_t> want{0, g1, g2, h->mul(g1, g2)};
        std::sort(want.begin(), want.end());
        CHECK(supp == want);
        CHECK(b_monomial(h, mh, Vec{0, 0, 0}) == AlgebraElement::one(h, mh));
        CHECK_THROWS_AS(b_monomial(h, mh, Vec{40, 40, 0}), BudgetError);

        for (int t = 0; t < 30; ++t) {
            auto u = random_element(h, mh, rng, 6), v = random_element(h, mh, rng, 6), w = random_element(h, mh, rng, 6);
            REQUIRE((u * v) * w == u * (v * w));
            REQUIRE(u * (v + w) == u * v + u * w);
        }
    }

    TEST_CASE("b-expansion inverts the binomial transform")
    {
        auto h = QuotientGroup::build(GroupChart::heisenberg(3), 1);
        Modulus m(3, 3);
        std::mt19937_64 rng(3);
        for (int t = 0; t < 20; ++t) {
            auto x = random_element(h, m, rng, t < 10 ? 2 : 20);
            Vec lam = b_expansion(x);
            AlgebraElement back(h, m);
            for (std::size_t a = 0; a < lam.size(); ++a)
                if (lam[a] != 0)
                    back = back + b_monomial(h, m, h->coords(a)).scaled(lam[a]);
            REQUIRE(back == x);
        }
    }

    TEST_CASE("Lazard values")
    {
        auto q = QuotientGroup::build(GroupChart::zp(3), 2);
        Modulus m(3, 4);
        CHECK(precision_floor(*q, m) == 3);
        CHECK(lazard_value(AlgebraElement::scalar(q, m, 3)) == FiltValue::exact(1));
        CHECK(lazard_value(AlgebraElement::b(q, m, 0)) == FiltValue::exact(1));
        auto gp = AlgebraElement::group(q, m, q->pow(1, 3)) - AlgebraElement::one(q, m);
        CHECK(lazard_value(gp) == FiltValue::exact(2));
        CHECK(lazard_value(AlgebraElement::zero(q, m)).kind == FiltKind::Zero);
        CHECK(lazard_value(AlgebraElement::scalar(q, m, 27)) == FiltValue::at_least(3));
        CHECK_THROWS_AS(lazard_value(gp, 1), BudgetError);

        auto h = QuotientGroup::build(GroupChart::heisenberg(3), 2);
        Modulus mh(3, 4);
        CHECK(lazard_value(AlgebraElement::b(h, mh, 2)) == FiltValue::exact(2));
    }

    TEST_CASE("Lazard value is sub-multiplicative and sub-additive")
    {
        std::mt19937_64 rng(77);
        auto h = QuotientGroup::build(GroupChart::heisenberg(3), 2);
        Modulus m(3, 4);
        for (int t = 0; t < 500; ++t) {
            // Random combinations of b-monomials with p-power coefficients.
            auto make = [&] {
                AlgebraElement x(h, m);
                for (int k = 0; k < 3; ++k) {
                    Vec a{rng() % 3, rng() % 3, rng() % 2};
                    x = x + b_monomial(h, m, a).scaled(m.p_power(static_cast<int>(rng() % 3)) * (1 + rng() % 2));
                }
                return x;
            };
            auto x = make(), y = make();
            FiltValue wx = lazard_value(x), wy = lazard_value(y);
            if (wx.is_exact() && wy.is_exact()) {
                REQUIRE(consistent_ge(lazard_value(x * y), wx.value + wy.value));
                REQUIRE(consistent_ge(lazard_value(x + y), std::min(wx.value, wy.value)));
            }
        }
    }

    TEST_CASE("value lemma examples")
    {
        auto q4 = QuotientGroup::build(GroupChart::zp(3), 4);
        Modulus m5(3, 5);
        auto gp = AlgebraElement::group(q4, m5, q4->pow(1, 3));
        auto r = lemma_value_check(gp, 2);
        CHECK(r.lhs == FiltValue::exact(4));
        CHECK(r.rhs == FiltValue::exact(4));
        CHECK(r.ok);

        auto q3 = QuotientGroup::build(GroupChart::zp(3), 3);
        Modulus m4(3, 4);
        auto x = AlgebraElement::one(q3, m4) + AlgebraElement::b(q3, m4, 0).scaled(3);
        auto r2 = lemma_value_check(x, 1);
        CHECK(r2.lhs == FiltValue::exact(3));
        CHECK(r2.rhs == FiltValue::exact(3));

        auto r3 = lemma_value_check(AlgebraElement::one(q3, m4), 3);
        CHECK(r3.lhs.kind == FiltKind::Zero);
        CHECK(r3.ok);
        CHECK_THROWS_AS(lemma_value_check(AlgebraElement::group(q3, m4, 1), 1), ValidationError);

        // char p: w(z^p - 1) = p w(z - 1) for central z = g3.
        auto h = QuotientGroup::build(GroupChart::heisenberg(3), 2);
        Modulus f3(3, 1);
        auto z = AlgebraElement::group(h, f3, h->generator(2));
        auto rp = lemma_value_check(z, 1);
        CHECK(rp.lhs == FiltValue::exact(6));
        CHECK(rp.ok);
    }

    TEST_CASE("ideal closure")
    {
        auto q = QuotientGroup::build(GroupChart::zp(3), 1);
        Modulus m(3, 2);
        auto zero = ideal_closure({AlgebraElement::zero(q, m)}, Side::TwoSided, q, m);
        CHECK(zero.length() == 0);
        auto aug = ideal_closure({AlgebraElement::b(q, m, 0)}, Side::TwoSided, q, m);
        CHECK(aug.form().nrows() == 2);
        CHECK(aug.form().is_free());
        // Oracle: the augmentation ideal is the kernel of the coefficient sum.
        for (u64 a = 0; a < 9; ++a)
            for (u64 b = 0; b < 9; ++b)
                for (u64 c = 0; c < 9; ++c) {
                    AlgebraElement x(q, m, Vec{a, b, c});
                    REQUIRE(aug.contains(x) == ((a + b + c) % 9 == 0));
                }

        auto h = QuotientGroup::build(GroupChart::heisenberg(3), 1);
        auto z1 = AlgebraElement::b(h, m, 2);
        auto two = ideal_closure({z1}, Side::TwoSided, h, m);
        auto left = ideal_closure({z1}, Side::Left, h, m);
        auto right = ideal_closure({z1}, Side::Right, h, m);
        CHECK(two == left);
        CHECK(two == right);
        // A non-central generator gives different one-sided closures.
        auto b1 = AlgebraElement::b(h, m, 0);
        CHECK_FALSE(ideal_closure({b1}, Side::Left, h, m) == ideal_closure({b1}, Side::TwoSided, h, m));

        std::mt19937_64 rng(4);
        for (int t = 0; t < 10; ++t) {
            auto g1 = random_element(h, m, rng, 3), g2 = random_element(h, m, rng, 3);
            auto I = ideal_closure({g1}, Side::Right, h, m);
            auto J = ideal_closure({g1, g2}, Side::Right, h, m);
            CHECK(I.is_subset_of(J));
            CHECK(ideal_closure(I.rows(), Side::Right, h, m) == I);
        }
    }

    TEST_CASE("canonical action")
    {
        auto h = QuotientGroup::build(GroupChart::heisenberg(3), 1);
        Modulus m(3, 2);
        std::mt19937_64 rng(8);
        auto r = random_element(h, m, rng, 10);
        Vec one(h->order(), 1);
        CHECK(rho(one, r) == r);
        std::size_t g = r.support().front();
        Vec ind(h->order(), 0);
        ind[g] = 1;
        AlgebraElement expect(h, m);
        expect.set(g, r.coeff(g));
        CHECK(rho(ind, r) == expect);
        Vec f(h->order()), f2(h->order()), prod(h->order()), sum(h->order());
        for (std::size_t i = 0; i < f.size(); ++i) {
            f[i] = rng() % 9;
            f2[i] = rng() % 9;
            prod[i] = f[i] * f2[i];
            sum[i] = f[i] + f2[i];
        }
        CHECK(rho(prod, r) == rho(f, rho(f2, r)));
        CHECK(rho(sum, r) == rho(f, r) + rho(f2, r));
        // r - rho(1 - 1_U)(r) is the part of r on U; here U = <g2, g3>.
        Vec not_u(h->order());
        for (std::size_t i = 0; i < not_u.size(); ++i)
            not_u[i] = h->coord(i, 0) == 0 ? 0 : 1;
        auto part = r - rho(not_u, r);
        for (std::size_t i = 0; i < not_u.size(); ++i)
            CHECK(part.coeff(i) == (h->coord(i, 0) == 0 ? r.coeff(i) : 0));
    }
}
