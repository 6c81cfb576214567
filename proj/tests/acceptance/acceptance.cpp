// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "iwasawa/control.hpp"
#include "iwasawa/mahler.hpp"
#include "iwasawa/padic.hpp"
#include "iwasawa/parallel.hpp"
#include "iwasawa/report.hpp"

using namespace iwasawa;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string data_path(const std::string& name) { return std::string(IWASAWA_DATA_DIR) + "/" + name; }

RunConfig config(const std::string& command, const std::string& file)
{
    RunConfig c;
    c.command = command;
    c.input = data_path(file);
    c.structured = true;
    return c;
}

// ------------------------------------------------------------------ 1

Outcome example_reproduction()
{
    Outcome o;
    auto a = cmd_ucs(config("ucs", "example2.json"), load_input(data_path("example2.json")));
    const auto& series = a.doc.at("series");
    const bool z2 = series.size() >= 2 && series[1].at("span") == "span{x2,x3,x5}";
    const bool c2 = a.doc.at("centralizer").at("span") == "span{x2,x3,x4,x5}";
    auto b = cmd_ucs(config("ucs", "upper5.json"), load_input(data_path("upper5.json")));
    const bool zeros = b.doc.at("centralizer").at("zero_in") == ojson::array({"E12", "E45"});
    o.pass = z2 && c2 && zeros && a.exit_code == 0 && b.exit_code == 0;
    o.detail = "Z_2 " + series[1].at("span").get<std::string>() + ", C(Z_2) " +
               a.doc.at("centralizer").at("span").get<std::string>() + "; upper 5x5 C(Z_2) zero in " +
               b.doc.at("centralizer").at("zero_in").dump();
    return o;
}

// ------------------------------------------------------------------ 2

int gmp_val(const mpz_class& x, u64 p)
{
    mpz_class y = x;
    int v = 0;
    while (mpz_divisible_ui_p(y.get_mpz_t(), p)) {
        mpz_divexact_ui(y.get_mpz_t(), y.get_mpz_t(), p);
        ++v;
    }
    return v;
}

Outcome valuation_identities()
{
    Outcome o;
    std::size_t checks = 0;
    for (u64 p : {2, 3, 5}) {
        u64 running = 0; // sum of v_p(j) for j <= k
        for (u64 k = 1; k <= 10000; ++k) {
            running += static_cast<u64>(vp(static_cast<i64>(k), p));
            const u64 legendre = (k - digit_sum(k, p)) / (p - 1);
            if (legendre_factorial_val(k, p) != running || legendre != running) {
                o.pass = false;
                o.detail = "v_p(k!) differs at p=" + std::to_string(p) + " k=" + std::to_string(k);
                return o;
            }
            ++checks;
        }
    }
    for (u64 p : {2, 3, 5, 7}) {
        for (int m = 1;; ++m) {
            const u64 pm = checked_pow(p, m);
            if (pm > 2187)
                break;
            mpz_class c = 1;
            for (u64 k = 1; k < pm; ++k) {
                c = c * (pm - k + 1) / k;
                if (vp_binom_prime_power(m, k, p) != gmp_val(c, p)) {
                    o.pass = false;
                    o.detail = "v_p(binom(p^m,k)) differs at p=" + std::to_string(p) + " m=" + std::to_string(m) +
                               " k=" + std::to_string(k);
                    return o;
                }
                ++checks;
            }
        }
    }
    o.detail = std::to_string(checks) + " values against direct sums and GMP binomials";
    return o;
}

// ------------------------------------------------------------------ 3

Outcome lemma_value()
{
    Outcome o;
    Modulus mod(3, 6);
    std::mt19937_64 rng(2024);
    std::size_t exact = 0, total = 0;
    for (auto chart : {GroupChart::zp(3), GroupChart::heisenberg(3)}) {
        auto q = QuotientGroup::build(chart, 3);
        const long floor = precision_floor(*q, mod);
        const std::size_t d = q->dim();
        for (int t = 0; t < 100; ++t) {
            // 1 + y with every term of y of Lazard weight at least 2.
            auto x = AlgebraElement::one(q, mod);
            const int terms = 1 + static_cast<int>(rng() % 3);
            for (int k = 0; k < terms; ++k) {
                std::vector<u64> alpha(d, 0);
                const int deg = static_cast<int>(rng() % 3);
                for (int j = 0; j < deg; ++j)
                    ++alpha[rng() % d];
                long weight = 0;
                for (std::size_t i = 0; i < d; ++i)
                    weight += static_cast<long>(alpha[i]) * chart->omega()[i];
                u64 c = 1 + rng() % (mod.value() - 1);
                if (weight < 2)
                    c = mod.reduce_u(c * checked_pow(3, static_cast<int>(2 - weight)));
                x = x + b_monomial(q, mod, alpha).scaled(c);
            }
            for (u64 m = 0; static_cast<long>(m) < floor; ++m) {
                auto r = lemma_value_check(x, m);
                ++total;
                if (r.rhs.is_exact()) {
                    ++exact;
                    if (!(r.lhs == r.rhs)) {
                        o.pass = false;
                        o.detail = chart->name() + ": w(x^{p^" + std::to_string(m) + "}-1) = " + r.lhs.to_string() +
                                   ", expected " + r.rhs.to_string();
                        return o;
                    }
                } else if (!r.ok) {
                    o.pass = false;
                    o.detail = chart->name() + ": floor case inconsistent";
                    return o;
                }
            }
        }
    }
    o.pass = exact > 0;
    o.detail = std::to_string(exact) + " exact equalities among " + std::to_string(total) + " checks below the floor";
    return o;
}

// ------------------------------------------------------------------ 4

Outcome mahler_round_trip()
{
    Outcome o;
    Modulus mod(3, 3);
    std::mt19937_64 rng(31);
    int functions = 0;
    for (int t = 0; t < 20; ++t) {
        // Polynomial part sum_{k <= K} c_k binom(beta, k); odd t add c a^beta
        // with a = 1 mod 3.
        const u64 K = rng() % 6;
        std::vector<u64> c(K + 1);
        for (auto& v : c)
            v = rng() % 27;
        c[K] = 1 + rng() % 26;
        const bool twisted = t % 2 == 1;
        const u64 a = 1 + 3 * (1 + rng() % 8), unit = 1 + 3 * (rng() % 9);
        auto f = [&](const Vec& beta) {
            u64 s = 0;
            for (u64 k = 0; k <= K; ++k)
                s = mod.add(s, mod.mul(c[k], binom_mod(beta[0], k, mod)));
            if (twisted)
                s = mod.add(s, mod.mul(unit, mod.pow(a, beta[0])));
            return Vec{s};
        };
        auto T = mahler_coeffs(f, 1, 27, mod, 1);
        for (u64 g = 0; g < 27; ++g) {
            std::vector<u64> gamma{g};
            auto r = reconstruct(T, gamma);
            if (r.value != f(Vec{g}) || r.tail_bound != 3) {
                o.pass = false;
                o.detail = "function " + std::to_string(t) + " differs at " + std::to_string(g);
                return o;
            }
        }
        if (!decay_eventually_increasing(T.decay, K + 1)) {
            o.pass = false;
            o.detail = "function " + std::to_string(t) + ": decay not increasing past shell " + std::to_string(K);
            return o;
        }
        ++functions;
    }
    o.detail = std::to_string(functions) + " functions reconstructed on Z/27 with D = 27";
    return o;
}

// ------------------------------------------------------------------ 5

Outcome mahler_conditions()
{
    Outcome o;
    struct Case {
        std::string label;
        AutomorphismSpec phi;
        QuotientPtr q;
        Modulus mod;
        u64 D;
    };
    std::vector<Case> cases;
    auto H = GroupChart::heisenberg(3);
    auto qh = QuotientGroup::build(H, 1);
    Modulus m3(3, 2);
    auto h = [&](std::size_t i) { return GroupElement::generator(H, i); };
    cases.push_back({"heisenberg identity", AutomorphismSpec::identity(H), qh, m3, 4});
    cases.push_back({"heisenberg conj g1", AutomorphismSpec::conjugation(h(0)), qh, m3, 4});
    cases.push_back({"heisenberg conj g2", AutomorphismSpec::conjugation(h(1)), qh, m3, 4});
    cases.push_back({"heisenberg conj g1 g2", AutomorphismSpec::conjugation(h(0) * h(1)), qh, m3, 4});
    cases.push_back({"heisenberg conj g2^2 g3", AutomorphismSpec::conjugation(h(1).pow(2) * h(2)), qh, m3, 4});
    cases.push_back({"heisenberg g1 -> g1 g3",
                     AutomorphismSpec::from_images(H, {h(0) * h(2), h(1), h(2)}), qh, m3, 4});
    cases.push_back({"heisenberg g1 -> g1 g2", AutomorphismSpec::from_images(H, {h(0) * h(1), h(1), h(2)}), qh,
                     m3, 4});

    auto V = GroupChart::graded_unitriangular(5, 4);
    auto qv = QuotientGroup::build(V, 1);
    Modulus m5(5, 2);
    for (std::size_t i : {0, 1, 2, 3})
        cases.push_back({"graded 4x4 conj g" + std::to_string(i + 1),
                         AutomorphismSpec::conjugation(GroupElement::generator(V, i)), qv, m5, 3});
    std::vector<IntMatrix> basis;
    for (std::size_t i : {0, 2, 1, 3, 4, 5})
        basis.push_back(V->basis_matrix(i));
    auto W = GroupChart::create(5, basis, "graded 4x4, E34 before E23");
    auto qw = QuotientGroup::build(W, 1);
    cases.push_back({"reordered 4x4 conj g1", AutomorphismSpec::conjugation(GroupElement::generator(W, 0)), qw, m5, 3});

    std::vector<MahlerAutResult> res(cases.size());
    parallel_for(cases.size(), hardware_threads(), [&](std::size_t k) {
        res[k] = is_mahler_aut(cases[k].phi, cases[k].q, cases[k].mod, cases[k].D);
    });
    int yes = 0, no = 0;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        if (res[k].by_formula != res[k].by_commutation) {
            o.pass = false;
            o.detail = cases[k].label + ": by formula and by commutation disagree";
            return o;
        }
        (res[k].by_formula ? yes : no)++;
    }
    o.pass = cases.size() >= 10 && yes > 0 && no > 0;
    o.detail = std::to_string(cases.size()) + " automorphisms agree, " + std::to_string(yes) + " Mahler, " +
               std::to_string(no) + " not";
    return o;
}

// ------------------------------------------------------------------ 6

Outcome expansion_convergence()
{
    Outcome o;
    auto H = GroupChart::heisenberg(3);
    auto q = QuotientGroup::build(H, 2);
    Modulus mod(3, 4);
    const u64 D = 2 * (9 - 1);
    const long floor = precision_floor(*q, mod);
    auto h = [&](std::size_t i) { return GroupElement::generator(H, i); };
    std::vector<std::pair<std::string, AutomorphismSpec>> auts = {
        {"g1", AutomorphismSpec::conjugation(h(0))},
        {"g2", AutomorphismSpec::conjugation(h(1))},
        {"g1 g2^2", AutomorphismSpec::conjugation(h(0) * h(1).pow(2))},
    };
    std::size_t checked = 0;
    for (const auto& [label, phi] : auts) {
        auto table = aut_mahler_coeffs(phi, q, mod, D);
        const auto phi_q = phi.on_quotient(*q);
        std::vector<std::vector<FiltValue>> res(q->order());
        parallel_for(q->order(), hardware_threads(), [&](std::size_t g) {
            res[g] = expansion_residuals(phi, table, phi_q, AlgebraElement::group(q, mod, g));
        });
        for (std::size_t g = 0; g < q->order(); ++g) {
            const auto& r = res[g];
            if (!residuals_monotone(r, floor)) {
                o.pass = false;
                o.detail = "conj " + label + ": residual decreases at element " + std::to_string(g);
                return o;
            }
            if (r.back().kind != FiltKind::Zero && r.back().lower_bound() < floor) {
                o.pass = false;
                o.detail = "conj " + label + ": element " + std::to_string(g) + " ends at " + r.back().to_string();
                return o;
            }
            ++checked;
        }
    }
    o.detail = std::to_string(checked) + " elements reach the floor " + std::to_string(floor) + " by D = " +
               std::to_string(D);
    return o;
}

// ------------------------------------------------------------------ 7

Outcome growth_dichotomy()
{
    Outcome o;
    auto H = GroupChart::heisenberg(3);
    auto h = [&](std::size_t i) { return GroupElement::generator(H, i); };
    struct Case {
        std::string label;
        AutomorphismSpec phi;
        int n, N, m_max;
        GrowthLaw law;
    };
    std::vector<Case> cases = {
        {"char0 conj g1, n=4 N=6", AutomorphismSpec::conjugation(h(0)), 4, 6, 3, GrowthLaw::Affine},
        {"char0 conj g2, n=3 N=5", AutomorphismSpec::conjugation(h(1)), 3, 5, 3, GrowthLaw::Affine},
        {"charp conj g1, n=3", AutomorphismSpec::conjugation(h(0)), 3, 1, 3, GrowthLaw::Geometric},
        {"charp conj g1 g2, n=3", AutomorphismSpec::conjugation(h(0) * h(1)), 3, 1, 3, GrowthLaw::Geometric},
    };
    std::ostringstream detail;
    for (const auto& c : cases) {
        auto q = QuotientGroup::build(H, c.n);
        Modulus mod(3, c.N);
        auto s = approx_series(c.phi, q, mod, c.m_max);
        if (!s.realizing) {
            o.pass = false;
            detail << c.label << ": lambda unresolved; ";
            continue;
        }
        auto fit = fit_growth(s.values[*s.realizing], c.law, 3);
        std::size_t exact_cells = 0;
        for (const auto& v : s.values[*s.realizing])
            exact_cells += v.is_exact();
        const bool ok = fit.exact && fit.lambda && exact_cells >= 2;
        o.pass = o.pass && ok;
        detail << c.label << ": lambda " << (fit.lambda ? std::to_string(*fit.lambda) : "?") << ", " << exact_cells
               << " exact cells" << (ok ? "" : " FAILED") << "; ";
    }
    o.detail = detail.str();
    return o;
}

// ------------------------------------------------------------------ 8

AlgebraElement random_sparse(const QuotientPtr& q, const Modulus& m, std::mt19937_64& rng)
{
    auto x = AlgebraElement::zero(q, m);
    const int terms = 1 + static_cast<int>(rng() % 3);
    for (int t = 0; t < terms; ++t)
        x.set(rng() % q->order(), rng() % m.value());
    return x;
}

Outcome control_cross_check()
{
    Outcome o;
    Modulus mod(3, 2);
    std::mt19937_64 rng(8);
    std::vector<ChartPtr> charts = {GroupChart::zp(3), GroupChart::abelian(3, 2), GroupChart::abelian(3, 3),
                                    GroupChart::heisenberg(3)};
    std::size_t ideals = 0, cells = 0;
    for (const auto& chart : charts)
        for (int n : {1, 2}) {
            auto q = QuotientGroup::build(chart, n);
            for (int t = 0; t < 7; ++t) {
                std::vector<AlgebraElement> gens;
                for (int k = 0; k < 1 + t % 2; ++k)
                    gens.push_back(random_sparse(q, mod, rng));
                if (t % 3 == 2)
                    gens[0] = gens[0] * AlgebraElement::b(q, mod, rng() % q->dim());
                auto I = ideal_closure(gens, Side::Right, q, mod);
                auto est = controller_estimate(I, -1, hardware_threads());
                cells += est.cells.size();
                ++ideals;
                if (!est.agree) {
                    o.pass = false;
                    o.detail = chart->name() + " n=" + std::to_string(n) + ": verdicts disagree";
                    return o;
                }
            }
        }
    auto H = GroupChart::heisenberg(3);
    std::string central;
    for (int n : {1, 2}) {
        auto q = QuotientGroup::build(H, n);
        for (u64 c : {1, 2, 4}) {
            auto z = AlgebraElement::b(q, mod, 2).scaled(c);
            auto est = controller_estimate(ideal_closure({z}, Side::Right, q, mod), -1, hardware_threads());
            ++ideals;
            cells += est.cells.size();
            if (!est.agree || !(est.estimate == OpenSubgroupSpec{{n, n, 0}})) {
                o.pass = false;
                central = " central ideal at n=" + std::to_string(n) + " gave " + est.estimate.to_string();
            }
        }
    }
    o.pass = o.pass && ideals >= 50;
    o.detail = std::to_string(ideals) + " ideals, " + std::to_string(cells) + " cells agree" +
               (central.empty() ? "; (g3 - 1) estimates (n,n,0)" : ";" + central);
    return o;
}

// ------------------------------------------------------------------ 9

Outcome idempotent_dichotomy()
{
    Outcome o;
    std::size_t checks = 0;
    for (u64 p : {3, 5})
        for (int n = 0; n <= 4; ++n) {
            const u64 top = checked_pow(p, n + 1);
            for (u64 b = 0; b < top; ++b) {
                PadicScalar beta = PadicScalar::from_residue(p, n + 1, b);
                const u64 want = b % p == 0 ? 0 : 1;
                auto r = idempotent_power(beta, n);
                if (r.residue() != want || r.prec() != n + 1) {
                    o.pass = false;
                    o.detail = "p=" + std::to_string(p) + " n=" + std::to_string(n) + " beta=" + std::to_string(b);
                    return o;
                }
                ++checks;
            }
        }
    o.detail = std::to_string(checks) + " residues";
    return o;
}

// ------------------------------------------------------------------ 10

Outcome determinism()
{
    Outcome o;
    std::vector<RunConfig> runs;
    runs.push_back(config("ucs", "example2.json"));
    auto m = config("mahler", "heisenberg_conj.json");
    m.degree = 8;
    runs.push_back(m);
    auto big = config("mahler", "graded4_mahler.json");
    big.level = 1;
    big.coeff_prec = 2;
    big.degree = 3;
    big.samples = 24;
    big.seed = 11;
    runs.push_back(big);
    auto c = config("control", "heisenberg_central_ideal.json");
    c.coeff_prec = 2;
    runs.push_back(c);
    auto g = config("growth", "heisenberg_conj.json");
    g.level = 3;
    g.coeff_prec = 5;
    runs.push_back(g);
    auto gp = g;
    gp.regime = Regime::CharP;
    runs.push_back(gp);

    const unsigned most = std::max(8u, hardware_threads());
    std::size_t compared = 0;
    for (auto& cfg : runs) {
        const auto input = load_input(cfg.input);
        std::string first;
        for (unsigned threads : {1u, most, 1u, 3u}) {
            cfg.threads = threads;
            std::string out = render(run_command(cfg, input), cfg);
            if (first.empty()) {
                first = out;
            } else if (out != first) {
                o.pass = false;
                o.detail = cfg.command + " on " + cfg.input + " differs with " + std::to_string(threads) + " threads";
                return o;
            }
            ++compared;
        }
    }
    o.detail = std::to_string(compared) + " structured reports identical across runs and 1.." + std::to_string(most) +
               " threads";
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"example reproduction", example_reproduction},
        {"valuation identities", valuation_identities},
        {"lemma value at finite level", lemma_value},
        {"Mahler round trip", mahler_round_trip},
        {"Mahler conditions equivalence", mahler_conditions},
        {"expansion convergence", expansion_convergence},
        {"growth dichotomy", growth_dichotomy},
        {"control cross-check", control_cross_check},
        {"idempotent dichotomy", idempotent_dichotomy},
        {"determinism", determinism},
    };
    // Wall-clock limits in seconds; 0 means none.
    const double limits[] = {1, 10, 0, 0, 0, 0, 0, 60, 0, 0};

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome r;
        try {
            r = criteria[k].second();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (limits[k] > 0 && secs >= limits[k]) {
            r.pass = false;
            r.detail += " (over the " + std::to_string(static_cast<int>(limits[k])) + " s limit)";
        }
        failed += !r.pass;
        std::printf("criterion %zu %s: %s [%.2f s] %s\n", k + 1, r.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                    secs, r.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
