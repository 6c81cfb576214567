#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iwasawa/algebra.hpp"
#include "iwasawa/control.hpp"
#include "iwasawa/mahler.hpp"
#include "iwasawa/nilpotent.hpp"

namespace iwasawa {

using ojson = nlohmann::ordered_json;

struct RunConfig {
    std::string command;
    std::string input; // path, or empty when the document is passed in
    std::optional<u64> p;
    int level = 2;
    int coeff_prec = 4;
    u64 degree = 4;
    int m_max = 3;
    Regime regime = Regime::Char0;
    bool structured = false;
    u64 seed = 1;
    unsigned threads = 1;
    long j_rank = 1;
    std::size_t samples = 64;
    std::size_t max_terms = 32;

    ojson to_json() const;
};

struct Report {
    ojson doc;
    std::string text;
    int exit_code = 0;
};

std::string regime_name(Regime r);
Regime parse_regime(const std::string& s);

// Input documents are JSON objects with optional sections "presentation",
// "chart", "automorphism" and "ideal". Indices in them are one-based.
ojson load_input(const std::string& path);
u64 resolve_p(const RunConfig& cfg, const ojson& input);
LiePresentation parse_presentation(const ojson& j, u64 p);
ChartPtr parse_chart(const ojson& j, u64 p);
// "g1^2 g3^-1", "g2*g1", "1".
GroupElement parse_word(const std::string& word, const ChartPtr& chart);
AutomorphismSpec parse_automorphism(const ojson& j, const ChartPtr& chart);
// Rational coefficient "a/b" or an integer, reduced mod p^N.
u64 parse_coefficient(const ojson& j, const Modulus& mod);
std::vector<AlgebraElement> parse_generators(const ojson& ideal, const QuotientPtr& q, const Modulus& mod);

ojson filt_json(const FiltValue& v);
ojson element_json(const AlgebraElement& x, std::size_t max_terms);

Report cmd_ucs(const RunConfig& cfg, const ojson& input);
Report cmd_mahler(const RunConfig& cfg, const ojson& input);
Report cmd_control(const RunConfig& cfg, const ojson& input);
Report cmd_growth(const RunConfig& cfg, const ojson& input);
Report run_command(const RunConfig& cfg, const ojson& input);

// Text, or the structured document with a trailing newline.
std::string render(const Report& r, const RunConfig& cfg);

} // namespace iwasawa
