#include <doctest.h>

#include <random>

#include "iwasawa/chart.hpp"

using namespace iwasawa;

TEST_SUITE("chart")
{
    TEST_CASE("Heisenberg dictionary")
    {
        auto H = GroupChart::heisenberg(3);
        CHECK(H->omega() == std::vector<int>{1, 1, 2});
        CHECK_FALSE(H->powerful());
        auto x1 = Vec{1, 0, 0};
        auto g1 = GroupElement::exp(H, x1);
        CHECK(g1.log() == x1);
        CHECK(GroupElement::exp(H, Vec{0, 0, 0}).is_identity());

        auto g2 = GroupElement::generator(H, 1);
        auto c = commutator(g1, g2);
        // Matrix oracle: the commutator is I + p^2 E13.
        Matrix expect = H->identity();
        expect[0 * 3 + 2] = 9;
        CHECK(H->equal_at(c.matrix(), expect, H->reliable_prec()));
        CHECK(c.coordinates(4) == Vec{0, 0, 1});
        CHECK(g2.pow(5).coordinates(4) == Vec{0, 5, 0});
        CHECK(GroupElement::identity(H).coordinates(4) == Vec{0, 0, 0});
        CHECK(c.omega() == 2);
        CHECK(g1.pow(9).omega() == 3);

        auto L = H->lie_presentation(4);
        CHECK(L.c(0, 1, 2) == 1);
        CHECK(L.c(1, 0, 2) == -1);
    }

    TEST_CASE("round trip on random coordinates")
    {
        std::mt19937_64 rng(2024);
        for (auto chart : {GroupChart::zp(3), GroupChart::abelian(5, 3), GroupChart::heisenberg(3),
                           GroupChart::heisenberg(7), GroupChart::unitriangular(3, 4),
                           GroupChart::unitriangular(5, 3), GroupChart::graded_unitriangular(5, 4),
                           GroupChart::graded_unitriangular(7, 5)}) {
            const u64 q = checked_pow(chart->p(), 4);
            for (int t = 0; t < 200; ++t) {
                Vec beta(chart->dim());
                for (auto& b : beta)
                    b = rng() % q;
                auto g = GroupElement::from_coordinates(chart, beta);
                REQUIRE(g.coordinates(4) == beta);
                // exp and log are mutually inverse on the Lie lattice.
                Vec lam = g.log();
                auto back = GroupElement::exp(chart, lam);
                REQUIRE(back == g);
            }
        }
    }

    TEST_CASE("coordinates hold to the reliable precision")
    {
        std::mt19937_64 rng(7);
        for (auto chart : {GroupChart::heisenberg(3), GroupChart::unitriangular(3, 4),
                           GroupChart::graded_unitriangular(5, 4)}) {
            const int r = chart->reliable_prec();
            CHECK(r >= 20);
            const u64 q = checked_pow(chart->p(), r);
            for (int t = 0; t < 100; ++t) {
                Vec beta(chart->dim());
                for (auto& b : beta)
                    b = rng() % q;
                REQUIRE(GroupElement::from_coordinates(chart, beta).coordinates(r) == beta);
            }
        }
    }

    TEST_CASE("graded 4x4 commutators are generators")
    {
        auto V = GroupChart::graded_unitriangular(5, 4);
        CHECK(V->omega() == std::vector<int>{1, 1, 1, 2, 2, 3});
        CHECK_FALSE(V->powerful());
        auto g = [&](std::size_t i) { return GroupElement::generator(V, i); };
        CHECK(commutator(g(0), g(1)).coordinates(6) == Vec{0, 0, 0, 1, 0, 0});
        CHECK(commutator(g(1), g(2)).coordinates(6) == Vec{0, 0, 0, 0, 1, 0});
    }

    TEST_CASE("unitriangular 4x4 structure")
    {
        auto U = GroupChart::unitriangular(3, 4);
        CHECK(U->dim() == 6);
        CHECK(U->powerful());
        auto L = U->lie_presentation(4);
        CHECK(validate(L).valid());
        // [x1, x4] = p x2 in lex order.
        CHECK(L.c(0, 3, 1) == 3);
    }

    TEST_CASE("rejections")
    {
        CHECK_THROWS_AS(GroupChart::heisenberg(2), ValidationError);
        IntMatrix unit{{0, 1}, {0, 0}};
        CHECK_THROWS_AS(GroupChart::create(3, {unit}), ValidationError);
        IntMatrix lower{{0, 0}, {3, 0}};
        CHECK_THROWS_AS(GroupChart::create(3, {lower}), ValidationError);
        auto H = GroupChart::heisenberg(3);
        Matrix bad = H->identity();
        bad[3] = 1; // below the diagonal
        CHECK_THROWS_AS(H->log_unipotent(bad), ValidationError);
        // p E13 alone is not reachable from x3 = p^2 E13 integrally.
        Matrix off = H->identity();
        off[2] = 3;
        CHECK_THROWS_AS(GroupElement(H, off).coordinates(), ValidationError);
    }
}
