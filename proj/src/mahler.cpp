#include "iwasawa/mahler.hpp"

#include <algorithm>

#include "iwasawa/padic.hpp"

namespace iwasawa {

// ---------------------------------------------------------------- simplex

Simplex::Simplex(std::size_t d, u64 D) : d_(d), D_(D)
{
    if (d == 0)
        throw ValidationError("simplex dimension must be positive");
    for (u64 s = 0; s <= D; ++s) {
        // Compositions of s into d parts in lexicographic order.
        Vec a(d, 0);
        a[d - 1] = s;
        std::vector<Vec> shell;
        std::function<void(std::size_t, u64)> rec = [&](std::size_t i, u64 left) {
            if (i + 1 == d) {
                a[i] = left;
                shell.push_back(a);
                return;
            }
            for (u64 v = 0; v <= left; ++v) {
                a[i] = v;
                rec(i + 1, left - v);
            }
        };
        rec(0, s);
        for (auto& v : shell) {
            where_[v] = points_.size();
            points_.push_back(std::move(v));
        }
    }
}

std::size_t Simplex::find(std::span<const u64> alpha) const
{
    auto it = where_.find(Vec(alpha.begin(), alpha.end()));
    return it == where_.end() ? points_.size() : it->second;
}

u64 Simplex::total(std::span<const u64> alpha)
{
    u64 s = 0;
    for (auto a : alpha)
        s += a;
    return s;
}

const Vec& MahlerTable::at(std::span<const u64> alpha) const
{
    std::size_t i = simplex.find(alpha);
    if (i == simplex.size())
        throw BudgetError("multi-index lies outside the table's degree cap");
    return entries[i];
}

// ---------------------------------------------------------------- tables

namespace {

FiltValue min_filt(const FiltValue& a, const FiltValue& b)
{
    if (a.kind == FiltKind::Zero)
        return b;
    if (b.kind == FiltKind::Zero)
        return a;
    if (a.is_exact() && b.is_exact())
        return a.value <= b.value ? a : b;
    if (a.is_exact())
        return a.value < b.value ? a : b;
    if (b.is_exact())
        return b.value < a.value ? b : a;
    return a.value <= b.value ? a : b;
}

FiltValue entry_value(const Vec& v, const Modulus& mod, const QuotientPtr& q)
{
    if (q)
        return lazard_value(AlgebraElement(q, mod, v));
    int best = kInfiniteValuation;
    for (auto x : v)
        best = std::min(best, mod.val(x));
    return best == kInfiniteValuation ? FiltValue::zero() : FiltValue::exact(best);
}

void compute_decay(MahlerTable& T)
{
    T.decay.assign(T.simplex.degree() + 1, FiltValue::zero());
    for (std::size_t i = 0; i < T.simplex.size(); ++i) {
        u64 s = Simplex::total(T.simplex[i]);
        T.decay[s] = min_filt(T.decay[s], entry_value(T.entries[i], T.mod, T.quotient));
    }
}

} // namespace

MahlerTable mahler_coeffs(const MahlerFunction& f, std::size_t d, u64 D, Modulus mod, std::size_t width,
                          QuotientPtr quotient)
{
    MahlerTable T{Simplex(d, D), mod, width, {}, {}, std::move(quotient)};
    const auto& S = T.simplex;
    T.entries.reserve(S.size());
    for (const auto& beta : S.points()) {
        Vec v = f(beta);
        if (v.size() != width)
            throw ValidationError("function value has the wrong width");
        for (auto& x : v)
            x = mod.reduce_u(x);
        T.entries.push_back(std::move(v));
    }
    // Forward differences along each axis, one line at a time.
    std::vector<std::size_t> line;
    for (std::size_t axis = 0; axis < d; ++axis) {
        for (std::size_t start = 0; start < S.size(); ++start) {
            const Vec& b0 = S[start];
            if (b0[axis] != 0)
                continue;
            const u64 L = D - Simplex::total(b0);
            line.clear();
            Vec b = b0;
            for (u64 k = 0; k <= L; ++k) {
                b[axis] = k;
                line.push_back(S.find(b));
            }
            for (u64 k = 1; k <= L; ++k)
                for (u64 j = L; j >= k; --j) {
                    Vec& hi = T.entries[line[j]];
                    const Vec& lo = T.entries[line[j - 1]];
                    for (std::size_t c = 0; c < width; ++c)
                        hi[c] = mod.sub(hi[c], lo[c]);
                }
        }
    }
    compute_decay(T);
    return T;
}

Vec mahler_coeff_direct(const MahlerFunction& f, std::span<const u64> alpha, Modulus mod)
{
    const std::size_t d = alpha.size();
    Vec beta(d, 0), acc;
    while (true) {
        Vec v = f(beta);
        if (acc.empty())
            acc.assign(v.size(), 0);
        u64 c = mod.reduce(1);
        u64 parity = 0;
        for (std::size_t i = 0; i < d; ++i) {
            c = mod.mul(c, binom_mod(alpha[i], beta[i], mod));
            parity += alpha[i] - beta[i];
        }
        if (parity % 2)
            c = mod.neg(c);
        for (std::size_t k = 0; k < v.size(); ++k)
            acc[k] = mod.add(acc[k], mod.mul(c, mod.reduce_u(v[k])));
        std::size_t i = 0;
        while (i < d && beta[i] == alpha[i])
            beta[i++] = 0;
        if (i == d)
            break;
        ++beta[i];
    }
    return acc;
}

bool decay_eventually_increasing(const std::vector<FiltValue>& decay, std::size_t from)
{
    bool seen_zero = false;
    std::optional<long> last;
    for (std::size_t s = from; s < decay.size(); ++s) {
        const auto& v = decay[s];
        if (v.kind == FiltKind::Zero) {
            seen_zero = true;
            continue;
        }
        if (seen_zero)
            return false;
        if (v.kind == FiltKind::AtLeast)
            continue; // below the stage's resolution
        if (last && v.value <= *last)
            return false;
        last = v.value;
    }
    return true;
}

Reconstruction reconstruct(const MahlerTable& T, std::span<const u64> gamma, int required)
{
    const auto& S = T.simplex;
    if (gamma.size() != S.dim())
        throw ValidationError("point has the wrong dimension");
    Vec value(T.width, 0);
    for (std::size_t i = 0; i < S.size(); ++i) {
        const Vec& a = S[i];
        u64 c = T.mod.reduce(1);
        for (std::size_t k = 0; k < a.size() && c != 0; ++k)
            c = a[k] > gamma[k] ? 0 : T.mod.mul(c, binom_mod(gamma[k], a[k], T.mod));
        if (c == 0)
            continue;
        for (std::size_t k = 0; k < T.width; ++k)
            value[k] = T.mod.add(value[k], T.mod.mul(c, T.entries[i][k]));
    }
    int tail = T.mod.precision();
    if (Simplex::total(gamma) > S.degree()) {
        const FiltValue& top = T.decay.back();
        if (top.kind != FiltKind::Zero)
            tail = static_cast<int>(std::min<long>(tail, top.value));
    }
    if (tail < required)
        throw BudgetError("Mahler tail bound " + std::to_string(tail) + " is below the requested " +
                          std::to_string(required) + " digits");
    return {std::move(value), tail};
}

AlgebraElement divided_power(std::span<const u64> alpha, const AlgebraElement& x, bool strict)
{
    const QuotientGroup& q = x.quotient();
    const Modulus& mod = x.modulus();
    if (alpha.size() != q.dim())
        throw ValidationError("multi-index has the wrong length");
    if (strict) {
        u64 loss = 0;
        for (auto a : alpha)
            loss += legendre_factorial_val(a, q.p());
        if (static_cast<u64>(q.level()) < static_cast<u64>(mod.precision()) + loss)
            throw PrecisionError("divided power needs level n >= N + v_p(alpha!)");
    }
    AlgebraElement r(x.quotient_ptr(), mod);
    for (auto g : x.support()) {
        u64 c = x.coeff(g);
        for (std::size_t i = 0; i < alpha.size() && c != 0; ++i)
            c = mod.mul(c, binom_mod(q.coord(g, i), alpha[i], mod));
        r.set(g, c);
    }
    return r;
}

// ---------------------------------------------------------------- automorphisms

AutomorphismSpec AutomorphismSpec::identity(ChartPtr chart)
{
    AutomorphismSpec a;
    for (std::size_t i = 0; i < chart->dim(); ++i)
        a.images_.push_back(GroupElement::generator(chart, i));
    a.conjugator_ = GroupElement::identity(chart);
    a.chart_ = std::move(chart);
    a.description_ = "identity";
    return a;
}

AutomorphismSpec AutomorphismSpec::conjugation(const GroupElement& c)
{
    AutomorphismSpec a;
    a.chart_ = c.chart_ptr();
    GroupElement ci = c.inverse();
    for (std::size_t i = 0; i < a.chart_->dim(); ++i)
        a.images_.push_back(c * GroupElement::generator(a.chart_, i) * ci);
    a.conjugator_ = c;
    auto beta = c.coordinates();
    const u64 top = checked_pow(a.chart_->p(), a.chart_->reliable_prec());
    a.description_ = "conjugation by g^(";
    for (std::size_t i = 0; i < beta.size(); ++i) {
        const std::string b = beta[i] > top / 2 ? "-" + std::to_string(top - beta[i]) : std::to_string(beta[i]);
        a.description_ += (i ? "," : "") + b;
    }
    a.description_ += ")";
    return a;
}

AutomorphismSpec AutomorphismSpec::from_images(ChartPtr chart, std::vector<GroupElement> images)
{
    if (images.size() != chart->dim())
        throw ValidationError("need one image per basis element");
    for (const auto& g : images)
        if (g.chart_ptr() != chart)
            throw ValidationError("image belongs to a different chart");
    AutomorphismSpec a;
    a.chart_ = std::move(chart);
    a.images_ = std::move(images);
    a.description_ = "images";
    return a;
}

GroupElement AutomorphismSpec::apply(const GroupElement& g) const
{
    if (conjugator_)
        return *conjugator_ * g * conjugator_->inverse();
    Vec beta = g.coordinates();
    GroupElement r = GroupElement::identity(chart_);
    for (std::size_t i = 0; i < beta.size(); ++i)
        if (beta[i] != 0)
            r = r * images_[i].pow(beta[i]);
    return r;
}

AutomorphismSpec AutomorphismSpec::power(u64 k) const
{
    if (conjugator_) {
        auto a = conjugation(conjugator_->pow(k));
        a.description_ = description_ + "^" + std::to_string(k);
        return a;
    }
    std::vector<GroupElement> imgs;
    for (std::size_t i = 0; i < chart_->dim(); ++i) {
        GroupElement g = GroupElement::generator(chart_, i);
        for (u64 t = 0; t < k; ++t)
            g = apply(g);
        imgs.push_back(g);
    }
    auto a = from_images(chart_, std::move(imgs));
    a.description_ = description_ + "^" + std::to_string(k);
    return a;
}

GroupElement AutomorphismSpec::psi(std::size_t i) const
{
    return images_.at(i) * GroupElement::generator(chart_, i).inverse();
}

bool AutomorphismSpec::trivial_mod_centre() const
{
    for (std::size_t i = 0; i < chart_->dim(); ++i) {
        GroupElement s = psi(i);
        for (std::size_t j = 0; j < chart_->dim(); ++j) {
            GroupElement g = GroupElement::generator(chart_, j);
            if (!(s * g == g * s))
                return false;
        }
    }
    return true;
}

bool AutomorphismSpec::omega_compatible() const
{
    for (std::size_t i = 0; i < chart_->dim(); ++i) {
        int w = psi(i).omega();
        if (w != kInfiniteValuation && w - chart_->omega()[i] < 1)
            return false;
    }
    return true;
}

std::vector<std::size_t> AutomorphismSpec::on_quotient(const QuotientGroup& q) const
{
    if (q.chart_ptr() != chart_)
        throw ValidationError("quotient uses a different chart");
    std::vector<std::size_t> img(q.order());
    for (std::size_t a = 0; a < q.order(); ++a)
        img[a] = q.index_of(apply(q.element(a)));
    std::vector<bool> hit(q.order(), false);
    for (auto v : img) {
        if (hit[v])
            throw ValidationError("automorphism is not injective on the quotient");
        hit[v] = true;
    }
    for (std::size_t i = 0; i < q.dim(); ++i) {
        std::size_t g = q.generator(i);
        for (std::size_t a = 0; a < q.order(); ++a)
            if (img[q.mul(a, g)] != q.mul(img[a], img[g]))
                throw ValidationError("images do not define a homomorphism of the quotient");
    }
    return img;
}

MahlerTable aut_mahler_coeffs(const AutomorphismSpec& phi, QuotientPtr q, Modulus mod, u64 D)
{
    auto img = phi.on_quotient(*q);
    const std::size_t N = q->order();
    MahlerFunction f = [&](const Vec& beta) {
        std::size_t g = q->index(beta);
        Vec v(N, 0);
        v[q->mul(img[g], q->inv(g))] = 1;
        return v;
    };
    return mahler_coeffs(f, q->dim(), D, mod, N, q);
}

MahlerAutResult is_mahler_aut(const AutomorphismSpec& phi, QuotientPtr q, Modulus mod, u64 D)
{
    MahlerAutResult r;
    auto img = phi.on_quotient(*q);
    const std::size_t d = q->dim();
    std::vector<std::size_t> psi(d);
    for (std::size_t i = 0; i < d; ++i)
        psi[i] = q->mul(img[q->generator(i)], q->inv(q->generator(i)));

    for (std::size_t i = 0; i < d && r.by_commutation; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            std::size_t g = q->generator(j);
            if (q->mul(psi[i], g) != q->mul(g, psi[i])) {
                r.by_commutation = false;
                r.commutation_witness = std::make_pair(i, j);
                break;
            }
        }

    MahlerTable T = aut_mahler_coeffs(phi, q, mod, D);
    const auto& S = T.simplex;
    std::vector<AlgebraElement> prod;
    prod.reserve(S.size());
    for (std::size_t k = 0; k < S.size(); ++k) {
        const Vec& a = S[k];
        if (k == 0) {
            prod.push_back(AlgebraElement::one(q, mod));
        } else {
            std::size_t last = d;
            while (a[last - 1] == 0)
                --last;
            Vec prev = a;
            --prev[last - 1];
            const AlgebraElement& base = prod[S.find(prev)];
            prod.push_back(base.right_translate(psi[last - 1]) - base);
        }
        if (prod.back().coeffs() != T.entries[k]) {
            r.by_formula = false;
            r.formula_witness = a;
            break;
        }
    }
    return r;
}

std::vector<FiltValue> expansion_residuals(const AutomorphismSpec&, const MahlerTable& T,
                                           const std::vector<std::size_t>& img, const AlgebraElement& x)
{
    const auto& q = x.quotient_ptr();
    const Modulus& mod = x.modulus();
    AlgebraElement target(q, mod);
    for (auto g : x.support())
        target.set(img[g], mod.add(target.coeff(img[g]), x.coeff(g)));

    const auto& S = T.simplex;
    std::vector<FiltValue> out;
    AlgebraElement approx(q, mod);
    u64 shell = 0;
    for (std::size_t k = 0; k <= S.size(); ++k) {
        if (k == S.size() || Simplex::total(S[k]) != shell) {
            out.push_back(lazard_value(target - approx));
            if (k == S.size())
                break;
            shell = Simplex::total(S[k]);
        }
        AlgebraElement m(q, mod, T.entries[k]);
        if (m.is_zero())
            continue;
        AlgebraElement dp = divided_power(S[k], x);
        if (!dp.is_zero())
            approx = approx + m * dp;
    }
    return out;
}

bool residuals_monotone(const std::vector<FiltValue>& residuals, long floor)
{
    for (std::size_t d = 1; d < residuals.size(); ++d)
        if (std::min(residuals[d].lower_bound(), floor) < std::min(residuals[d - 1].lower_bound(), floor))
            return false;
    return true;
}

Expansion expand_aut(const AutomorphismSpec& phi, const AlgebraElement& x, u64 D)
{
    auto T = aut_mahler_coeffs(phi, x.quotient_ptr(), x.modulus(), D);
    auto img = phi.on_quotient(x.quotient());
    AlgebraElement approx(x.quotient_ptr(), x.modulus());
    for (std::size_t k = 0; k < T.simplex.size(); ++k) {
        AlgebraElement m(x.quotient_ptr(), x.modulus(), T.entries[k]);
        if (!m.is_zero())
            approx = approx + m * divided_power(T.simplex[k], x);
    }
    AlgebraElement target(x.quotient_ptr(), x.modulus());
    for (auto g : x.support())
        target.set(img[g], x.modulus().add(target.coeff(img[g]), x.coeff(g)));
    return {approx, lazard_value(target - approx)};
}

// ---------------------------------------------------------------- z(phi)

ZApproximants z_map(const AutomorphismSpec& phi, const GroupElement& g, int m_max)
{
    const GroupChart& C = g.chart();
    const Modulus& W = C.working();
    ZApproximants out;
    for (int m = 0; m <= m_max; ++m) {
        const u64 pm = checked_pow(C.p(), m);
        GroupElement h = g;
        if (m == 0) {
            h = phi.apply(g);
        } else {
            AutomorphismSpec phim = phi.power(pm);
            h = phim.apply(g);
        }
        Vec lam = (h * g.inverse()).log();
        for (auto& l : lam) {
            if (l % pm != 0)
                throw PrecisionError("approximant is not a p^" + std::to_string(m) + "-th power at precision");
            l = W.exact_div_p(l, m);
        }
        out.values.push_back(GroupElement::exp(g.chart_ptr(), lam));
    }
    for (int m0 = 0; m0 + 1 <= m_max; ++m0) {
        bool same = true;
        for (int m = m0 + 1; m <= m_max && same; ++m)
            same = out.values[static_cast<std::size_t>(m)] == out.values[static_cast<std::size_t>(m0)];
        if (same) {
            out.stable_from = m0;
            break;
        }
    }
    return out;
}

std::vector<FiltValue> q_growth(const AutomorphismSpec& phi, std::size_t i, int m_max, QuotientPtr q, Modulus mod)
{
    if (i >= q->dim())
        throw ValidationError("basis index out of range");
    auto z = z_map(phi, GroupElement::generator(q->chart_ptr(), i), m_max);
    std::size_t zi = q->index_of(z.values.back());
    std::vector<FiltValue> out;
    AlgebraElement one = AlgebraElement::one(q, mod);
    for (int m = 0; m <= m_max; ++m) {
        std::size_t zp = q->pow(zi, checked_pow(q->p(), m));
        out.push_back(lazard_value(AlgebraElement::group(q, mod, zp) - one));
    }
    return out;
}

GrowthFit fit_growth(const std::vector<FiltValue>& values, GrowthLaw law, u64 p)
{
    GrowthFit fit;
    fit.law = law;
    fit.all_zero = !values.empty();
    for (const auto& v : values) {
        fit.cells.push_back(v.status());
        fit.all_zero = fit.all_zero && v.kind == FiltKind::Zero;
    }
    if (values.empty() || !values[0].is_exact()) {
        fit.exact = std::all_of(values.begin(), values.end(), [](const FiltValue& v) { return !v.is_exact(); });
        return fit;
    }
    const long lambda = values[0].value;
    fit.lambda = lambda;
    long scale = 1;
    for (std::size_t m = 0; m < values.size(); ++m) {
        long pred = law == GrowthLaw::Affine ? lambda + static_cast<long>(m) : scale * lambda;
        scale *= static_cast<long>(p);
        fit.predicted.push_back(pred);
        const auto& v = values[m];
        if (v.is_exact() && v.value != pred)
            fit.exact = false;
        if (v.kind == FiltKind::AtLeast && pred < v.value)
            fit.exact = false;
    }
    return fit;
}

ApproxBound approx_bound_check(const AutomorphismSpec& phi, QuotientPtr q, Modulus mod, int m,
                               std::span<const u64> alpha, int m_max)
{
    const std::size_t d = q->dim();
    if (m > m_max)
        throw ValidationError("m exceeds the approximation range");
    AlgebraElement one = AlgebraElement::one(q, mod);
    std::vector<std::size_t> z(d);
    for (std::size_t i = 0; i < d; ++i)
        z[i] = q->index_of(z_map(phi, GroupElement::generator(q->chart_ptr(), i), m_max).values.back());

    // lambda = min_i v(q_{i,0}); m1 = least m with v(z_i^{p^m} - 1) > v(p) for all i.
    FiltValue lam = FiltValue::zero();
    for (std::size_t i = 0; i < d; ++i) {
        FiltValue v = lazard_value(AlgebraElement::group(q, mod, z[i]) - one);
        if (v.kind == FiltKind::Zero)
            continue;
        if (lam.kind == FiltKind::Zero || v.lower_bound() < lam.lower_bound())
            lam = v;
    }
    int m1 = -1;
    for (int t = 0; t <= m_max && m1 < 0; ++t) {
        bool above = true;
        for (std::size_t i = 0; i < d && above; ++i) {
            FiltValue v = lazard_value(AlgebraElement::group(q, mod, q->pow(z[i], checked_pow(q->p(), t))) - one);
            above = !v.is_exact() || v.value > 1;
        }
        if (above)
            m1 = t;
    }
    if (m1 < 0)
        throw PrecisionError("no threshold m1 within the approximation range");

    const u64 pm = checked_pow(q->p(), m);
    auto T = aut_mahler_coeffs(phi.power(pm), q, mod, Simplex::total(alpha));
    AlgebraElement lhs_elem(q, mod, T.at(alpha));
    AlgebraElement qa = one;
    for (std::size_t i = 0; i < d; ++i) {
        AlgebraElement qi = AlgebraElement::group(q, mod, q->pow(z[i], pm)) - one;
        for (u64 t = 0; t < alpha[i]; ++t)
            qa = qa * qi;
    }
    FiltValue lhs = lazard_value(lhs_elem - qa);
    const long lambda = lam.kind == FiltKind::Zero ? 0 : lam.lower_bound();
    const long bound = (2L * m - m1) + (static_cast<long>(Simplex::total(alpha)) - 1) * lambda;
    return {lhs, bound, consistent_ge(lhs, bound), m1, lambda};
}

} // namespace iwasawa
