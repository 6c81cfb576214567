#include <iostream>

#include <CLI11.hpp>

#include "iwasawa/error.hpp"
#include "iwasawa/parallel.hpp"
#include "iwasawa/report.hpp"

using namespace iwasawa;

namespace {

void add_common(CLI::App* sub, RunConfig& cfg, std::string& regime, std::string& format, int& threads)
{
    sub->add_option("input", cfg.input, "JSON input document")->required()->check(CLI::ExistingFile);
    sub->add_option("--p", cfg.p, "prime (must match the input when both are given)");
    sub->add_option("--level,-n", cfg.level, "quotient level n: Q = G / G^{p^n}")->check(CLI::PositiveNumber);
    sub->add_option("--coeff-prec,-N", cfg.coeff_prec, "coefficient precision N: Z/p^N")->check(CLI::PositiveNumber);
    sub->add_option("--degree,-D", cfg.degree, "Mahler degree bound D");
    sub->add_option("--m-max", cfg.m_max, "largest m in growth tables")->check(CLI::NonNegativeNumber);
    sub->add_option("--regime", regime, "char0 | charp (charp sets N = 1)")
        ->check(CLI::IsMember({"char0", "charp"}));
    sub->add_option("--format", format, "text | structured")->check(CLI::IsMember({"text", "structured"}));
    sub->add_option("--seed", cfg.seed, "seed for sampled elements");
    sub->add_option("--samples", cfg.samples, "sampled elements when Q is large")->check(CLI::PositiveNumber);
    sub->add_option("--max-terms", cfg.max_terms, "largest support printed term by term");
    sub->add_option("--j-rank", cfg.j_rank, "rank bound for the stage J-ideal predicate");
    sub->add_option("--threads", threads, "worker threads (0: all cores); output does not depend on it")
        ->check(CLI::NonNegativeNumber);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite-stage computations in Iwasawa algebras of nilpotent uniform groups"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string regime = "char0", format = "text";
    int threads = 1;
    for (auto [name, help] : {std::pair{"ucs", "upper central series, centraliser of Z_2, nilpotency class"},
                              std::pair{"mahler", "Mahler coefficients of an automorphism and expansion residuals"},
                              std::pair{"control", "control of an ideal over the diagonal subgroup lattice"},
                              std::pair{"growth", "growth of v(z(g_i)^{p^m} - 1) with an exact law fit"}})
        add_common(app.add_subcommand(name, help), cfg, regime, format, threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.regime = parse_regime(regime);
    cfg.structured = format == "structured";
    cfg.threads = threads == 0 ? hardware_threads() : static_cast<unsigned>(threads);

    try {
        Report r = run_command(cfg, load_input(cfg.input));
        std::cout << render(r, cfg);
        return r.exit_code;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const PrecisionError& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 2;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
