#include "iwasawa/control.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "iwasawa/error.hpp"
#include "iwasawa/nilpotent.hpp"
#include "iwasawa/padic.hpp"
#include "iwasawa/parallel.hpp"

namespace iwasawa {

namespace {

constexpr int kZStabilisation = 3;

// Closure of `gens` under multiplication in Q, by breadth-first search.
std::vector<std::size_t> generated_subgroup(const QuotientGroup& q, const std::vector<std::size_t>& gens)
{
    std::vector<char> seen(q.order(), 0);
    std::vector<std::size_t> out{0};
    seen[0] = 1;
    for (std::size_t head = 0; head < out.size(); ++head)
        for (std::size_t g : gens) {
            std::size_t h = q.mul(out[head], g);
            if (!seen[h]) {
                seen[h] = 1;
                out.push_back(h);
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

void require_right_ideal(const SubmoduleBasis& I)
{
    if (I.side() == Side::Left)
        throw ValidationError("control is defined for right or two-sided ideals");
}

} // namespace

std::string OpenSubgroupSpec::to_string() const
{
    std::string s = "(";
    for (std::size_t i = 0; i < e.size(); ++i)
        s += (i ? "," : "") + std::to_string(e[i]);
    return s + ")";
}

SubgroupImage SubgroupImage::build(QuotientPtr q, const OpenSubgroupSpec& U)
{
    if (U.e.size() != q->dim())
        throw ValidationError("subgroup exponent vector has the wrong length");
    SubgroupImage s;
    s.q_ = q;
    s.spec_ = U;
    std::vector<std::size_t> gens;
    int expected = 0;
    for (std::size_t i = 0; i < q->dim(); ++i) {
        if (U.e[i] < 0 || U.e[i] > q->level())
            throw ValidationError("subgroup exponent " + std::to_string(U.e[i]) + " outside [0, level]");
        expected += q->level() - U.e[i];
        gens.push_back(q->pow(q->generator(i), checked_pow(q->p(), U.e[i])));
    }
    s.elements_ = generated_subgroup(*q, gens);
    s.compatible_ = s.elements_.size() == checked_pow(q->p(), expected);

    const std::size_t none = q->order();
    s.coset_.assign(q->order(), none);
    for (std::size_t h = 0; h < q->order(); ++h) {
        if (s.coset_[h] != none)
            continue;
        for (std::size_t u : s.elements_)
            s.coset_[q->mul(u, h)] = s.ncosets_;
        ++s.ncosets_;
    }
    return s;
}

Vec SubgroupImage::indicator(std::size_t coset) const
{
    Vec f(q_->order(), 0);
    for (std::size_t h = 0; h < f.size(); ++h)
        f[h] = coset_[h] == coset ? 1 : 0;
    return f;
}

ControlVerdict is_controlled(const SubmoduleBasis& I, const SubgroupImage& U)
{
    require_right_ideal(I);
    if (I.quotient_ptr() != U.quotient_ptr())
        throw ValidationError("ideal and subgroup live in different quotients");
    const auto& q = I.quotient_ptr();
    const Modulus& mod = I.modulus();
    ControlVerdict v;

    std::vector<bool> allowed(q->order(), false);
    for (std::size_t u : U.elements())
        allowed[u] = true;
    std::vector<AlgebraElement> gens;
    for (auto& r : I.form().intersect_coordinates(allowed))
        gens.emplace_back(q, mod, std::move(r));
    // (I cap A_U) A sits inside I, so equal length means equal modules.
    v.definitional = ideal_closure(gens, Side::Right, q, mod).length() == I.length();

    v.by_action = true;
    const auto rows = I.rows();
    for (const auto& r : rows) {
        // rho(1_{Uh}) r is the part of r on the coset Uh.
        std::vector<Vec> parts(U.coset_count(), Vec(q->order(), 0));
        for (std::size_t g : r.support())
            parts[U.coset_of(g)][g] = r.coeff(g);
        for (const auto& part : parts)
            if (!I.form().contains(part)) {
                v.by_action = false;
                return v;
            }
    }
    return v;
}

ControlVerdict is_controlled(const SubmoduleBasis& I, const OpenSubgroupSpec& U)
{
    return is_controlled(I, SubgroupImage::build(I.quotient_ptr(), U));
}

ControllerEstimate controller_estimate(const SubmoduleBasis& I, int max_exponent, unsigned threads)
{
    require_right_ideal(I);
    const auto& q = I.quotient_ptr();
    const std::size_t d = q->dim();
    const int top = max_exponent < 0 ? q->level() : std::min(max_exponent, q->level());
    const std::size_t side = static_cast<std::size_t>(top) + 1;
    std::size_t count = 1;
    for (std::size_t i = 0; i < d; ++i)
        count *= side;

    ControllerEstimate out;
    out.cells.resize(count);
    parallel_for(count, threads, [&](std::size_t k) {
        OpenSubgroupSpec spec{std::vector<int>(d)};
        std::size_t r = k;
        for (std::size_t i = d; i-- > 0;) {
            spec.e[i] = static_cast<int>(r % side);
            r /= side;
        }
        auto U = SubgroupImage::build(q, spec);
        ControlCell& cell = out.cells[k];
        cell.spec = spec;
        cell.compatible = U.compatible();
        cell.verdict = is_controlled(I, U);
    });

    out.estimate = OpenSubgroupSpec::whole(d);
    for (const auto& c : out.cells) {
        out.agree = out.agree && c.verdict.agree();
        if (!c.compatible || !c.verdict.definitional)
            continue;
        for (std::size_t i = 0; i < d; ++i)
            out.estimate.e[i] = std::max(out.estimate.e[i], c.spec.e[i]);
    }
    return out;
}

std::vector<CosetComponent> coset_split(const AlgebraElement& r, const SubgroupImage& U)
{
    const auto& q = r.quotient_ptr();
    if (q != U.quotient_ptr())
        throw ValidationError("element and subgroup live in different quotients");
    const std::size_t d = q->dim();
    std::vector<u64> radix(d);
    std::size_t reps = 1;
    for (std::size_t i = 0; i < d; ++i) {
        radix[i] = checked_pow(q->p(), U.spec().e[i]);
        reps *= radix[i];
    }
    if (reps != U.coset_count())
        throw ValidationError("representative enumeration mismatch: " + std::to_string(reps) +
                              " representatives for " + std::to_string(U.coset_count()) + " cosets");

    std::vector<CosetComponent> out;
    std::vector<std::size_t> slot(U.coset_count(), reps);
    Vec b(d, 0);
    for (std::size_t k = 0; k < reps; ++k) {
        std::size_t g = 0;
        for (std::size_t i = 0; i < d; ++i)
            g = q->mul_generator_power(g, i, b[i]);
        std::size_t c = U.coset_of(g);
        if (slot[c] != reps)
            throw ValidationError("representative enumeration mismatch: two representatives share a coset");
        slot[c] = out.size();
        out.push_back({b, g, AlgebraElement::zero(q, r.modulus())});
        for (std::size_t i = 0; i < d; ++i) {
            if (++b[i] < radix[i])
                break;
            b[i] = 0;
        }
    }
    for (std::size_t h : r.support()) {
        CosetComponent& cc = out[slot[U.coset_of(h)]];
        // h = u g_b with u = h g_b^{-1} in U.
        std::size_t u = q->mul(h, q->inv(cc.rep));
        cc.component.set(u, r.coeff(h));
    }
    return out;
}

Vec outside_indicator(const SubgroupImage& U)
{
    Vec f(U.quotient_ptr()->order(), 1);
    for (std::size_t u : U.elements())
        f[u] = 0;
    return f;
}

std::string tri_name(Tri t)
{
    switch (t) {
    case Tri::True:
        return "true";
    case Tri::False:
        return "false";
    default:
        return "indeterminate";
    }
}

ApproxSeries approx_series(const AutomorphismSpec& phi, QuotientPtr q, Modulus mod, int m_max, int m1)
{
    if (m1 < 0 || m_max < 0)
        throw ValidationError("m ranges must be non-negative");
    const std::size_t d = q->dim();
    ApproxSeries s{phi.power(checked_pow(q->p(), m1)), q, mod, m1, {}, {}, std::nullopt, std::nullopt, {}};
    for (std::size_t i = 0; i < d; ++i) {
        auto za = z_map(s.phi, GroupElement::generator(q->chart_ptr(), i), kZStabilisation);
        if (!za.stable_from)
            throw PrecisionError("z(g_" + std::to_string(i + 1) + ") did not stabilise");
        s.z.push_back(za.values.back());
        s.values.push_back(q_growth(s.phi, i, m_max, q, mod));
    }

    // lambda is the least v(q_{i,0}); a floor below the exact minimum leaves
    // it unresolved.
    std::optional<long> best;
    long floor = -1;
    for (std::size_t i = 0; i < d; ++i) {
        const FiltValue& v = s.values[i][0];
        if (v.kind == FiltKind::Exact && (!best || v.value < *best)) {
            best = v.value;
            s.realizing = i;
        } else if (v.kind == FiltKind::AtLeast) {
            floor = floor < 0 ? v.value : std::min(floor, v.value);
        }
    }
    if (best && (floor < 0 || *best <= floor))
        s.lambda = best;
    else
        s.realizing.reset();

    s.betas.assign(d, std::nullopt);
    if (!s.realizing)
        return s;
    const GroupChart& C = q->chart();
    const Modulus& W = C.working();
    const Vec lr = s.z[*s.realizing].log();
    std::size_t piv = 0;
    int v0 = kInfiniteValuation;
    for (std::size_t k = 0; k < lr.size(); ++k)
        if (W.val(lr[k]) < v0) {
            v0 = W.val(lr[k]);
            piv = k;
        }
    if (v0 == kInfiniteValuation)
        return s;
    const int prec = C.reliable_prec() - v0;
    const u64 check = W.p_power(std::max(0, std::min(prec, mod.precision())));
    const u64 unit_inv = W.inv(W.exact_div_p(lr[piv], v0));
    for (std::size_t i = 0; i < d; ++i) {
        const Vec li = s.z[i].log();
        if (W.val(li[piv]) < v0)
            continue;
        u64 beta = W.mul(W.exact_div_p(li[piv], v0), unit_inv);
        bool proportional = true;
        for (std::size_t k = 0; k < li.size() && proportional; ++k)
            proportional = W.sub(li[k], W.mul(beta, lr[k])) % check == 0;
        if (proportional)
            s.betas[i] = mod.reduce_u(beta);
    }
    return s;
}

Tri u_lambda(const ApproxSeries& s, const GroupElement& g)
{
    if (!s.lambda)
        throw PrecisionError("lambda is not resolved at this stage");
    auto za = z_map(s.phi, g, kZStabilisation);
    if (!za.stable_from)
        return Tri::Indeterminate;
    const std::size_t zi = s.q->index_of(za.values.back());
    auto x = AlgebraElement::group(s.q, s.mod, zi) - AlgebraElement::one(s.q, s.mod);
    FiltValue v = lazard_value(x);
    switch (v.kind) {
    case FiltKind::Zero:
        return Tri::True;
    case FiltKind::Exact:
        return v.value > *s.lambda ? Tri::True : Tri::False;
    default:
        return v.value > *s.lambda ? Tri::True : Tri::Indeterminate;
    }
}

ULambdaReport u_lambda_set(const ApproxSeries& s)
{
    const QuotientGroup& q = *s.q;
    ULambdaReport r;
    r.membership.resize(q.order());
    for (std::size_t g = 0; g < q.order(); ++g) {
        r.membership[g] = u_lambda(s, q.element(g));
        r.members += r.membership[g] == Tri::True;
        r.indeterminate += r.membership[g] == Tri::Indeterminate;
    }
    r.proper = r.members < q.order();
    std::vector<std::size_t> in;
    for (std::size_t g = 0; g < q.order(); ++g)
        if (r.membership[g] == Tri::True)
            in.push_back(g);
    r.closed = r.indeterminate == 0;
    for (std::size_t a : in) {
        if (!r.closed)
            break;
        r.closed = r.membership[q.inv(a)] == Tri::True;
    }
    // Every pair when small; a fixed sample otherwise.
    if (in.size() * in.size() <= 1000000) {
        for (std::size_t a = 0; a < in.size() && r.closed; ++a)
            for (std::size_t b = 0; b < in.size() && r.closed; ++b)
                r.closed = r.membership[q.mul(in[a], in[b])] == Tri::True;
    } else if (!in.empty()) {
        std::mt19937_64 rng(0x5eed);
        for (int t = 0; t < 200000 && r.closed; ++t)
            r.closed = r.membership[q.mul(in[rng() % in.size()], in[rng() % in.size()])] == Tri::True;
    }
    r.contains_pth_powers = true;
    for (std::size_t g = 0; g < q.order() && r.contains_pth_powers; ++g)
        r.contains_pth_powers = r.membership[q.pow(g, q.p())] == Tri::True;
    return r;
}

AlgebraElement h_derivation(std::span<const u64> betas, const AlgebraElement& x, bool strict)
{
    const std::size_t d = x.quotient().dim();
    if (betas.size() != d)
        throw ValidationError("need one beta per basis element");
    AlgebraElement out = AlgebraElement::zero(x.quotient_ptr(), x.modulus());
    Vec alpha(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
        if (x.modulus().reduce_u(betas[i]) == 0)
            continue;
        alpha[i] = 1;
        out = out + divided_power(alpha, x, strict).scaled(betas[i]);
        alpha[i] = 0;
    }
    return out;
}

bool annihilation_check(std::span<const u64> betas, const SubmoduleBasis& I)
{
    for (const auto& r : I.rows())
        if (!I.contains(h_derivation(betas, r)))
            return false;
    return true;
}

FaithfulnessReport stage_faithful(const SubmoduleBasis& I)
{
    const auto& q = I.quotient_ptr();
    FaithfulnessReport r;
    auto one = AlgebraElement::one(q, I.modulus());
    for (std::size_t g = 1; g < q->order(); ++g)
        if (I.contains(AlgebraElement::group(q, I.modulus(), g) - one)) {
            r.faithful = false;
            r.witness = g;
            break;
        }
    return r;
}

JIdealReport stage_j_ideal(const SubmoduleBasis& I, long rank_bound)
{
    const auto& q = I.quotient_ptr();
    const GroupChart& C = q->chart();
    const Modulus& mod = I.modulus();
    JIdealReport r;

    // Z(G) = exp of the centre of the Lie lattice.
    auto series = upper_central_series(C.lie_presentation(C.reliable_prec()));
    std::vector<std::size_t> gens;
    if (series.size() > 1)
        for (const auto& row : series[1].basis())
            gens.push_back(q->index_of(GroupElement::exp(q->chart_ptr(), row)));
    r.centre = generated_subgroup(*q, gens);

    HowellForm sum = I.form();
    const long before = sum.length();
    for (std::size_t z : r.centre)
        sum.insert(AlgebraElement::group(q, mod, z).coeffs());
    r.image_length = sum.length() - before;
    r.bound = rank_bound * mod.precision();
    r.holds = r.image_length <= r.bound;
    return r;
}

} // namespace iwasawa
