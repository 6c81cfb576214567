#include "iwasawa/report.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include "iwasawa/error.hpp"
#include "iwasawa/parallel.hpp"

namespace iwasawa {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i)
        out += (i ? sep : "") + parts[i];
    return out;
}

std::string vec_string(const Vec& v)
{
    std::vector<std::string> s;
    for (u64 x : v)
        s.push_back(std::to_string(x));
    return "(" + join(s, ",") + ")";
}

std::string ints_string(const std::vector<int>& v)
{
    std::vector<std::string> s;
    for (int x : v)
        s.push_back(std::to_string(x));
    return "(" + join(s, ",") + ")";
}

const ojson& section(const ojson& input, const char* name)
{
    if (!input.is_object() || !input.contains(name))
        throw ValidationError(std::string("input has no \"") + name + "\" section");
    return input.at(name);
}

std::size_t one_based(const ojson& j, std::size_t dim, const char* what)
{
    if (!j.is_number_integer())
        throw ValidationError(std::string(what) + " must be an integer");
    long v = j.get<long>();
    if (v < 1 || static_cast<std::size_t>(v) > dim)
        throw ValidationError(std::string(what) + " " + std::to_string(v) + " out of range 1.." + std::to_string(dim));
    return static_cast<std::size_t>(v - 1);
}

std::vector<std::string> labels_for(const ojson& input, std::size_t d)
{
    std::vector<std::string> out;
    if (input.contains("presentation") && input["presentation"].contains("labels")) {
        for (const auto& l : input["presentation"]["labels"])
            out.push_back(l.get<std::string>());
        if (out.size() != d)
            throw ValidationError("presentation labels do not match the dimension");
        return out;
    }
    for (std::size_t i = 0; i < d; ++i)
        out.push_back("x" + std::to_string(i + 1));
    return out;
}

std::string span_string(const Submodule& S, const std::vector<std::string>& labels)
{
    std::vector<std::size_t> idx;
    if (S.is_coordinate_span(&idx)) {
        if (idx.size() == S.ambient_dim())
            return "L";
        std::vector<std::string> names;
        for (std::size_t i : idx)
            names.push_back(labels[i]);
        return "span{" + join(names, ",") + "}";
    }
    return S.to_string();
}

std::vector<std::size_t> coordinate_indices(const Submodule& S)
{
    std::vector<std::size_t> idx;
    if (!S.is_coordinate_span(&idx))
        return {};
    return idx;
}

Modulus coefficient_modulus(const RunConfig& cfg, u64 p)
{
    if (cfg.regime == Regime::CharP)
        return Modulus(p, 1);
    if (cfg.coeff_prec < 2)
        throw ValidationError("char 0 regime needs --coeff-prec >= 2");
    return Modulus(p, cfg.coeff_prec);
}

void check_budgets(const RunConfig& cfg)
{
    if (cfg.level < 1 || cfg.coeff_prec < 1 || cfg.m_max < 0 || cfg.samples == 0)
        throw ValidationError("budgets must be positive");
}

Report base_report(const RunConfig& cfg, const std::string& command)
{
    Report r;
    r.doc["command"] = command;
    r.doc["config"] = cfg.to_json();
    return r;
}

bool reached_floor(const FiltValue& v) { return v.kind != FiltKind::Exact; }

} // namespace

std::string regime_name(Regime r) { return r == Regime::Char0 ? "char0" : "charp"; }

Regime parse_regime(const std::string& s)
{
    if (s == "char0")
        return Regime::Char0;
    if (s == "charp")
        return Regime::CharP;
    throw ValidationError("unknown regime '" + s + "' (char0 | charp)");
}

ojson RunConfig::to_json() const
{
    // Thread count is left out: it must not change the document.
    ojson j;
    j["input"] = input;
    j["p"] = p ? ojson(*p) : ojson(nullptr);
    j["level"] = level;
    j["coeff_prec"] = coeff_prec;
    j["degree"] = degree;
    j["m_max"] = m_max;
    j["regime"] = regime_name(regime);
    j["format"] = structured ? "structured" : "text";
    j["seed"] = seed;
    j["samples"] = samples;
    j["max_terms"] = max_terms;
    j["j_rank"] = j_rank;
    return j;
}

ojson load_input(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open " + path);
    try {
        return ojson::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

u64 resolve_p(const RunConfig& cfg, const ojson& input)
{
    std::optional<u64> p = cfg.p;
    auto take = [&](const ojson& j, const char* where) {
        if (!j.is_object() || !j.contains("p"))
            return;
        u64 v = j["p"].get<u64>();
        if (p && *p != v)
            throw ValidationError(std::string("prime in ") + where + " (" + std::to_string(v) +
                                  ") disagrees with " + std::to_string(*p));
        p = v;
    };
    take(input, "document");
    if (input.is_object()) {
        if (input.contains("presentation"))
            take(input["presentation"], "presentation");
        if (input.contains("chart"))
            take(input["chart"], "chart");
    }
    if (!p)
        throw ValidationError("no prime given (use --p or a \"p\" field)");
    if (!is_prime(*p))
        throw ValidationError(std::to_string(*p) + " is not prime");
    return *p;
}

LiePresentation parse_presentation(const ojson& j, u64 p)
{
    try {
        const std::size_t dim = j.at("dim").get<std::size_t>();
        if (dim == 0)
            throw ValidationError("dimension must be positive");
        const int prec = j.value("prec", 8);
        std::vector<BracketTerm> terms;
        for (const auto& t : j.value("brackets", ojson::array())) {
            if (!t.is_array() || t.size() != 4)
                throw ValidationError("bracket entries are [i, j, k, coefficient]");
            terms.push_back({one_based(t[0], dim, "bracket index"), one_based(t[1], dim, "bracket index"),
                             one_based(t[2], dim, "bracket index"), t[3].get<i64>()});
        }
        return LiePresentation(p, dim, prec, terms);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("presentation: ") + e.what());
    }
}

ChartPtr parse_chart(const ojson& j, u64 p)
{
    try {
        const std::string kind = j.value("kind", "matrices");
        ChartPtr c;
        if (kind == "zp")
            c = GroupChart::zp(p);
        else if (kind == "abelian")
            c = GroupChart::abelian(p, j.at("d").get<std::size_t>());
        else if (kind == "heisenberg")
            c = GroupChart::heisenberg(p);
        else if (kind == "unitriangular")
            c = GroupChart::unitriangular(p, j.at("n").get<std::size_t>());
        else if (kind == "graded_unitriangular")
            c = GroupChart::graded_unitriangular(p, j.at("n").get<std::size_t>());
        else if (kind != "matrices")
            throw ValidationError("unknown chart kind '" + kind + "'");

        std::vector<IntMatrix> basis;
        if (c) {
            for (std::size_t i = 0; i < c->dim(); ++i)
                basis.push_back(c->basis_matrix(i));
        } else {
            basis = j.at("basis").get<std::vector<IntMatrix>>();
        }
        if (j.contains("order")) {
            std::vector<IntMatrix> re;
            for (const auto& o : j["order"])
                re.push_back(basis[one_based(o, basis.size(), "chart order entry")]);
            if (re.size() != basis.size())
                throw ValidationError("chart order must list every basis element once");
            basis = std::move(re);
            c.reset();
        }
        if (!c)
            c = GroupChart::create(p, basis, j.value("name", kind));
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("chart: ") + e.what());
    }
}

GroupElement parse_word(const std::string& word, const ChartPtr& chart)
{
    GroupElement g = GroupElement::identity(chart);
    std::string w = word;
    std::replace(w.begin(), w.end(), '*', ' ');
    std::istringstream in(w);
    std::string tok;
    while (in >> tok) {
        if (tok == "1" || tok == "e")
            continue;
        if (tok.size() < 2 || tok[0] != 'g' || !std::isdigit(static_cast<unsigned char>(tok[1])))
            throw ValidationError("bad word token '" + tok + "' (expected g<i> or g<i>^<e>)");
        std::size_t pos = 1;
        while (pos < tok.size() && std::isdigit(static_cast<unsigned char>(tok[pos])))
            ++pos;
        const long idx = std::stol(tok.substr(1, pos - 1));
        if (idx < 1 || static_cast<std::size_t>(idx) > chart->dim())
            throw ValidationError("generator g" + std::to_string(idx) + " out of range");
        long e = 1;
        if (pos < tok.size()) {
            if (tok[pos] != '^')
                throw ValidationError("bad word token '" + tok + "'");
            try {
                std::size_t used = 0;
                e = std::stol(tok.substr(pos + 1), &used);
                if (used != tok.size() - pos - 1)
                    throw std::invalid_argument("trailing");
            } catch (const std::logic_error&) {
                throw ValidationError("bad exponent in '" + tok + "'");
            }
        }
        GroupElement x = GroupElement::generator(chart, static_cast<std::size_t>(idx - 1));
        if (e < 0)
            x = x.inverse();
        g = g * x.pow(static_cast<u64>(e < 0 ? -e : e));
    }
    return g;
}

AutomorphismSpec parse_automorphism(const ojson& j, const ChartPtr& chart)
{
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "identity")
            return AutomorphismSpec::identity(chart);
        if (kind == "conjugation")
            return AutomorphismSpec::conjugation(parse_word(j.at("by").get<std::string>(), chart));
        if (kind == "images") {
            std::vector<GroupElement> images;
            for (const auto& im : j.at("images")) {
                if (im.is_string()) {
                    images.push_back(parse_word(im.get<std::string>(), chart));
                    continue;
                }
                auto m = im.get<IntMatrix>();
                const std::size_t u = chart->size();
                if (m.size() != u)
                    throw ValidationError("image matrix has the wrong size");
                Matrix res(u * u);
                for (std::size_t a = 0; a < u; ++a) {
                    if (m[a].size() != u)
                        throw ValidationError("image matrix has the wrong size");
                    for (std::size_t b = 0; b < u; ++b)
                        res[a * u + b] = chart->working().reduce(m[a][b]);
                }
                images.emplace_back(chart, std::move(res));
            }
            return AutomorphismSpec::from_images(chart, std::move(images));
        }
        throw ValidationError("unknown automorphism kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("automorphism: ") + e.what());
    }
}

u64 parse_coefficient(const ojson& j, const Modulus& mod)
{
    if (j.is_number_integer())
        return mod.reduce(j.get<i64>());
    if (!j.is_string())
        throw ValidationError("coefficients are integers or \"a/b\" strings");
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
        std::size_t used = 0;
        i64 num = std::stoll(s.substr(0, slash), &used);
        if (used != (slash == std::string::npos ? s.size() : slash))
            throw std::invalid_argument("trailing");
        i64 den = 1;
        if (slash != std::string::npos) {
            den = std::stoll(s.substr(slash + 1), &used);
            if (used != s.size() - slash - 1)
                throw std::invalid_argument("trailing");
        }
        if (den == 0)
            throw ValidationError("zero denominator in '" + s + "'");
        if (static_cast<u64>(den < 0 ? -den : den) % mod.p() == 0)
            throw ValidationError("denominator of '" + s + "' is not a p-adic unit");
        return mod.mul(mod.reduce(num), mod.inv(mod.reduce(den)));
    } catch (const std::logic_error&) {
        throw ValidationError("bad coefficient '" + s + "'");
    }
}

std::vector<AlgebraElement> parse_generators(const ojson& ideal, const QuotientPtr& q, const Modulus& mod)
{
    std::vector<AlgebraElement> gens;
    try {
        for (const auto& g : ideal.value("generators", ojson::array())) {
            auto x = AlgebraElement::zero(q, mod);
            if (g.contains("terms")) {
                for (const auto& t : g["terms"]) {
                    if (!t.is_array() || t.size() != 2)
                        throw ValidationError("terms are [word, coefficient]");
                    std::size_t idx = q->index_of(parse_word(t[0].get<std::string>(), q->chart_ptr()));
                    x.set(idx, mod.add(x.coeff(idx), parse_coefficient(t[1], mod)));
                }
            }
            if (g.contains("b")) {
                for (const auto& t : g["b"]) {
                    if (!t.is_array() || t.size() != 2)
                        throw ValidationError("b-terms are [coefficient, [alpha_1, ..., alpha_d]]");
                    auto alpha = t[1].get<Vec>();
                    if (alpha.size() != q->dim())
                        throw ValidationError("b-monomial exponent has the wrong length");
                    x = x + b_monomial(q, mod, alpha).scaled(parse_coefficient(t[0], mod));
                }
            }
            if (!g.contains("terms") && !g.contains("b"))
                throw ValidationError("generator needs \"terms\" or \"b\"");
            gens.push_back(std::move(x));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("ideal: ") + e.what());
    }
    return gens;
}

ojson filt_json(const FiltValue& v)
{
    ojson j;
    j["value"] = v.kind == FiltKind::Zero ? ojson(nullptr) : ojson(v.value);
    j["status"] = v.status();
    return j;
}

ojson element_json(const AlgebraElement& x, std::size_t max_terms)
{
    ojson j;
    const auto sup = x.support();
    j["support"] = sup.size();
    j["w"] = filt_json(lazard_value(x));
    if (sup.size() <= max_terms) {
        ojson terms = ojson::array();
        for (std::size_t g : sup)
            terms.push_back(ojson{{"g", x.quotient().coords(g)}, {"c", x.coeff(g)}});
        j["terms"] = terms;
    }
    return j;
}

// ------------------------------------------------------------------- ucs

Report cmd_ucs(const RunConfig& cfg, const ojson& input)
{
    Report r = base_report(cfg, "ucs");
    const u64 p = resolve_p(cfg, input);
    std::optional<LiePresentation> L;
    if (input.contains("presentation"))
        L = parse_presentation(input["presentation"], p);
    else if (input.contains("chart")) {
        auto chart = parse_chart(input["chart"], p);
        L = chart->lie_presentation(std::min(chart->reliable_prec(), 16));
    } else {
        throw ValidationError("ucs needs a presentation or a chart");
    }
    const auto labels = labels_for(input, L->dim());
    std::ostringstream text;

    LieReport v = validate(*L);
    ojson vj;
    vj["antisymmetric"] = v.antisymmetric;
    vj["jacobi"] = v.jacobi;
    vj["nilpotent"] = v.nilpotent;
    vj["powerful"] = v.powerful;
    ojson viol = ojson::array();
    for (const auto& x : v.violations) {
        std::vector<std::size_t> idx;
        for (auto i : x.indices)
            idx.push_back(i + 1);
        viol.push_back(ojson{{"kind", x.kind}, {"indices", idx}, {"detail", x.detail}});
    }
    vj["violations"] = viol;
    r.doc["p"] = p;
    r.doc["dim"] = L->dim();
    r.doc["prec"] = L->prec();
    r.doc["validation"] = vj;
    text << "presentation: p=" << p << " dim=" << L->dim() << " prec=" << L->prec() << "\n";
    if (!v.valid()) {
        const std::string detail = v.to_string();
        text << "invalid presentation\n" << detail;
        if (!detail.empty() && detail.back() != '\n')
            text << "\n";
        r.text = text.str();
        r.exit_code = 1;
        return r;
    }

    auto series = upper_central_series(*L);
    const std::size_t cls = series.size() - 1;
    ojson sj = ojson::array();
    for (std::size_t i = 1; i < series.size(); ++i) {
        const std::string s = span_string(series[i], labels);
        sj.push_back(ojson{{"index", i}, {"rank", series[i].rank()}, {"span", s}});
        text << "Z_" << i << " = " << s << "\n";
    }
    const std::size_t zi = std::min<std::size_t>(2, cls);
    Submodule C = centralizer(*L, series[zi]);
    const std::string cs = span_string(C, labels);
    r.doc["series"] = sj;
    r.doc["class"] = cls;
    r.doc["centralizer"] = ojson{{"of", "Z_" + std::to_string(zi)}, {"rank", C.rank()}, {"span", cs}};
    std::vector<std::string> missing;
    auto idx = coordinate_indices(C);
    for (std::size_t i = 0; i < L->dim(); ++i)
        if (!idx.empty() && std::find(idx.begin(), idx.end(), i) == idx.end())
            missing.push_back(labels[i]);
    r.doc["centralizer"]["zero_in"] = missing;
    text << "class " << cls << "\n";
    text << "C(Z_" << zi << ") = " << cs << "\n";
    if (!missing.empty())
        text << "C(Z_" << zi << ") is zero in " << join(missing, ",") << "\n";
    r.text = text.str();
    return r;
}

// ---------------------------------------------------------------- mahler

Report cmd_mahler(const RunConfig& cfg, const ojson& input)
{
    check_budgets(cfg);
    Report r = base_report(cfg, "mahler");
    const u64 p = resolve_p(cfg, input);
    auto chart = parse_chart(section(input, "chart"), p);
    auto phi = parse_automorphism(section(input, "automorphism"), chart);
    const Modulus mod = coefficient_modulus(cfg, p);
    auto q = QuotientGroup::build(chart, cfg.level);
    const auto phi_q = phi.on_quotient(*q);
    std::ostringstream text;

    const long floor = precision_floor(*q, mod);
    r.doc["chart"] = chart->name();
    r.doc["automorphism"] = phi.description();
    r.doc["quotient_order"] = q->order();
    r.doc["precision_floor"] = floor;
    r.doc["trivial_mod_centre"] = phi.trivial_mod_centre();
    r.doc["omega_compatible"] = phi.omega_compatible();
    text << "automorphism " << phi.description() << " on " << chart->name() << ", |Q| = " << q->order()
         << ", N = " << mod.precision() << ", floor " << floor << "\n";
    text << "trivial mod centre: " << (phi.trivial_mod_centre() ? "yes" : "no") << "\n";

    auto table = aut_mahler_coeffs(phi, q, mod, cfg.degree);
    ojson coeffs = ojson::array();
    std::size_t nonzero = 0;
    for (std::size_t k = 0; k < table.simplex.size(); ++k) {
        AlgebraElement m(q, mod, table.entries[k]);
        if (m.is_zero())
            continue;
        ++nonzero;
        ojson e = element_json(m, cfg.max_terms);
        e["alpha"] = table.simplex[k];
        coeffs.push_back(e);
        text << "m" << vec_string(table.simplex[k]) << ": support " << m.support().size() << ", w "
             << lazard_value(m).to_string() << "\n";
    }
    r.doc["degree"] = cfg.degree;
    r.doc["nonzero_coefficients"] = nonzero;
    r.doc["coefficients"] = coeffs;
    ojson decay = ojson::array();
    std::vector<std::string> dt;
    for (std::size_t s = 0; s < table.decay.size(); ++s) {
        ojson d = filt_json(table.decay[s]);
        d["shell"] = s;
        decay.push_back(d);
        dt.push_back(table.decay[s].to_string());
    }
    r.doc["decay"] = decay;
    text << "nonzero coefficients: " << nonzero << "\n";
    text << "decay by shell: " << join(dt, " ") << "\n";

    auto crit = is_mahler_aut(phi, q, mod, cfg.degree);
    ojson cj;
    cj["by_formula"] = crit.by_formula;
    cj["by_commutation"] = crit.by_commutation;
    cj["formula_witness"] = crit.formula_witness ? ojson(*crit.formula_witness) : ojson(nullptr);
    cj["commutation_witness"] = crit.commutation_witness
                                    ? ojson(std::vector<std::size_t>{crit.commutation_witness->first + 1,
                                                                     crit.commutation_witness->second + 1})
                                    : ojson(nullptr);
    cj["agree"] = crit.by_formula == crit.by_commutation;
    r.doc["mahler_automorphism"] = cj;
    text << "Mahler automorphism: by formula " << (crit.by_formula ? "true" : "false") << ", by commutation "
         << (crit.by_commutation ? "true" : "false") << "\n";
    if (crit.formula_witness)
        text << "  formula differs at alpha = " << vec_string(*crit.formula_witness) << "\n";
    if (crit.commutation_witness)
        text << "  psi(g" << crit.commutation_witness->first + 1 << ") does not commute with g"
             << crit.commutation_witness->second + 1 << "\n";
    if (crit.by_formula != crit.by_commutation) {
        text << "INVARIANT VIOLATION: the two criteria disagree\n";
        r.exit_code = 3;
    }

    // Residuals of the truncated expansion, on every element when Q is small.
    std::vector<std::size_t> elems;
    if (q->order() <= 729) {
        for (std::size_t g = 0; g < q->order(); ++g)
            elems.push_back(g);
    } else {
        std::mt19937_64 rng(cfg.seed);
        std::vector<char> seen(q->order(), 0);
        for (std::size_t i = 0; i < q->dim(); ++i)
            seen[q->generator(i)] = 1;
        const std::size_t want = std::min(cfg.samples, q->order() - q->dim());
        while (elems.size() < want) {
            std::size_t g = rng() % q->order();
            if (!seen[g]) {
                seen[g] = 1;
                elems.push_back(g);
            }
        }
        for (std::size_t i = 0; i < q->dim(); ++i)
            elems.push_back(q->generator(i));
        std::sort(elems.begin(), elems.end());
    }
    std::vector<std::vector<FiltValue>> res(elems.size());
    parallel_for(elems.size(), cfg.threads, [&](std::size_t k) {
        res[k] = expansion_residuals(phi, table, phi_q, AlgebraElement::group(q, mod, elems[k]));
    });
    const std::size_t nd = static_cast<std::size_t>(cfg.degree) + 1;
    ojson per_d = ojson::array();
    bool monotone = true;
    for (const auto& row : res)
        monotone = monotone && residuals_monotone(row, floor);
    text << "expansion residuals over " << elems.size() << " elements:\n";
    for (std::size_t d = 0; d < nd; ++d) {
        std::size_t at_floor = 0;
        FiltValue worst = FiltValue::zero();
        for (const auto& row : res) {
            at_floor += reached_floor(row[d]);
            if (row[d].lower_bound() < worst.lower_bound() ||
                (row[d].lower_bound() == worst.lower_bound() && row[d].is_exact()))
                worst = row[d];
        }
        ojson dj = ojson{{"D", d}, {"min", filt_json(worst)}, {"at_floor", at_floor}};
        per_d.push_back(dj);
        text << "  D=" << d << ": min " << worst.to_string() << ", at floor " << at_floor << "/" << elems.size()
             << "\n";
    }
    ojson rows = ojson::array();
    for (std::size_t k = 0; k < elems.size() && k < cfg.samples; ++k) {
        ojson cells = ojson::array();
        for (const auto& v : res[k])
            cells.push_back(filt_json(v));
        rows.push_back(ojson{{"g", q->coords(elems[k])}, {"residuals", cells}});
    }
    r.doc["residuals"] = ojson{{"elements", elems.size()}, {"monotone", monotone}, {"by_degree", per_d}, {"rows", rows}};
    text << "residuals non-decreasing in D: " << (monotone ? "yes" : "no") << "\n";
    r.text = text.str();
    return r;
}

// --------------------------------------------------------------- control

Report cmd_control(const RunConfig& cfg, const ojson& input)
{
    check_budgets(cfg);
    Report r = base_report(cfg, "control");
    const u64 p = resolve_p(cfg, input);
    auto chart = parse_chart(section(input, "chart"), p);
    const ojson& ideal = section(input, "ideal");
    const Modulus mod = coefficient_modulus(cfg, p);
    auto q = QuotientGroup::build(chart, cfg.level);
    const Side side = parse_side(ideal.value("side", "right"));
    auto gens = parse_generators(ideal, q, mod);
    auto I = ideal_closure(gens, side, q, mod);
    std::ostringstream text;

    r.doc["chart"] = chart->name();
    r.doc["quotient_order"] = q->order();
    r.doc["side"] = side_name(side);
    r.doc["generators"] = gens.size();
    r.doc["ideal_length"] = I.length();
    text << "ideal on " << chart->name() << ", |Q| = " << q->order() << ", N = " << mod.precision() << ": "
         << gens.size() << " generators, " << side_name(side) << ", length " << I.length() << "\n";

    auto est = controller_estimate(I, -1, cfg.threads);
    ojson cells = ojson::array();
    text << "control over the diagonal lattice (e: definitional/by_action):\n";
    for (const auto& c : est.cells) {
        cells.push_back(ojson{{"e", c.spec.e},
                              {"compatible", c.compatible},
                              {"definitional", c.verdict.definitional},
                              {"by_action", c.verdict.by_action}});
        text << "  " << ints_string(c.spec.e) << ": " << (c.verdict.definitional ? "T" : "F") << "/"
             << (c.verdict.by_action ? "T" : "F") << (c.compatible ? "" : " (incompatible, not used)") << "\n";
    }
    r.doc["cells"] = cells;
    r.doc["agree"] = est.agree;
    r.doc["controller_estimate"] = est.estimate.e;
    text << "controller estimate (upper bound): e = " << ints_string(est.estimate.e) << "\n";
    if (!est.agree) {
        text << "INVARIANT VIOLATION: definitional and action verdicts disagree\n";
        r.exit_code = 3;
    }

    auto faith = stage_faithful(I);
    r.doc["stage_faithful"] = ojson{{"holds", faith.faithful},
                                    {"witness", faith.witness ? ojson(q->coords(*faith.witness)) : ojson(nullptr)}};
    text << "stage faithfulness: " << (faith.faithful ? "holds" : "fails");
    if (faith.witness)
        text << " (g = " << vec_string(q->coords(*faith.witness)) << " has g - 1 in I)";
    text << "\n";
    auto j = stage_j_ideal(I, cfg.j_rank);
    r.doc["stage_j_ideal"] = ojson{{"centre_order", j.centre.size()},
                                   {"image_length", j.image_length},
                                   {"bound", j.bound},
                                   {"holds", j.holds}};
    text << "stage J-ideal: centre image length " << j.image_length << " against " << j.bound << ": "
         << (j.holds ? "holds" : "fails") << "\n";
    r.text = text.str();
    return r;
}

// ---------------------------------------------------------------- growth

Report cmd_growth(const RunConfig& cfg, const ojson& input)
{
    check_budgets(cfg);
    Report r = base_report(cfg, "growth");
    const u64 p = resolve_p(cfg, input);
    auto chart = parse_chart(section(input, "chart"), p);
    auto phi = parse_automorphism(section(input, "automorphism"), chart);
    const Modulus mod = coefficient_modulus(cfg, p);
    auto q = QuotientGroup::build(chart, cfg.level);
    if (!phi.inner())
        phi.on_quotient(*q);
    const GrowthLaw law = cfg.regime == Regime::Char0 ? GrowthLaw::Affine : GrowthLaw::Geometric;
    std::ostringstream text;

    auto s = approx_series(phi, q, mod, cfg.m_max);
    r.doc["chart"] = chart->name();
    r.doc["automorphism"] = phi.description();
    r.doc["precision_floor"] = precision_floor(*q, mod);
    r.doc["law"] = law == GrowthLaw::Affine ? "lambda + m" : "p^m * lambda";
    r.doc["lambda"] = s.lambda ? ojson(*s.lambda) : ojson(nullptr);
    r.doc["realizing_index"] = s.realizing ? ojson(*s.realizing + 1) : ojson(nullptr);
    text << "growth of v(z(g_i)^{p^m} - 1), " << regime_name(cfg.regime) << ", law "
         << (law == GrowthLaw::Affine ? "lambda + m" : "p^m * lambda") << ", floor "
         << precision_floor(*q, mod) << "\n";

    ojson rows = ojson::array();
    bool all_zero = true;
    for (std::size_t i = 0; i < q->dim(); ++i) {
        auto fit = fit_growth(s.values[i], law, p);
        all_zero = all_zero && fit.all_zero;
        const FiltValue& first = s.values[i][0];
        // The value lemma needs w(x - 1) > w(p) = 1 in char 0.
        const bool applies = first.is_exact() && (cfg.regime == Regime::CharP || first.value > 1);
        ojson cells = ojson::array();
        std::vector<std::string> ct;
        for (std::size_t m = 0; m < s.values[i].size(); ++m) {
            ojson c = filt_json(s.values[i][m]);
            c["m"] = m;
            if (fit.lambda)
                c["predicted"] = fit.predicted[m];
            cells.push_back(c);
            ct.push_back(s.values[i][m].to_string());
        }
        rows.push_back(ojson{{"i", i + 1},
                             {"cells", cells},
                             {"lambda", fit.lambda ? ojson(*fit.lambda) : ojson(nullptr)},
                             {"applies", applies},
                             {"exact_fit", fit.exact},
                             {"all_zero", fit.all_zero},
                             {"beta", s.betas[i] ? ojson(*s.betas[i]) : ojson(nullptr)}});
        text << "  i=" << i + 1 << ": " << join(ct, " ");
        if (fit.all_zero)
            text << "  (all infinite)";
        else if (applies)
            text << "  fit " << (fit.exact ? "exact" : "FAILS") << ", lambda " << *fit.lambda;
        else
            text << "  law not applicable";
        text << "\n";
        if (applies && !fit.exact) {
            r.exit_code = 3;
            text << "INVARIANT VIOLATION: growth law fails for i=" << i + 1 << "\n";
        }
    }
    r.doc["rows"] = rows;
    r.doc["all_infinite"] = all_zero;
    if (s.lambda)
        text << "lambda = " << *s.lambda << " at i = " << *s.realizing + 1 << "\n";
    else
        text << "lambda unresolved\n";
    r.text = text.str();
    return r;
}

Report run_command(const RunConfig& cfg, const ojson& input)
{
    if (cfg.command == "ucs")
        return cmd_ucs(cfg, input);
    if (cfg.command == "mahler")
        return cmd_mahler(cfg, input);
    if (cfg.command == "control")
        return cmd_control(cfg, input);
    if (cfg.command == "growth")
        return cmd_growth(cfg, input);
    throw ValidationError("unknown command '" + cfg.command + "'");
}

std::string render(const Report& r, const RunConfig& cfg)
{
    if (cfg.structured)
        return r.doc.dump(2) + "\n";
    return r.text;
}

} // namespace iwasawa
