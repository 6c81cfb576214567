#include "iwasawa/chart.hpp"

#include <algorithm>
#include <cmath>

#include "rational.hpp"

namespace iwasawa {

using detail::Rat;
using detail::RatMatrix;
using detail::RatRow;

namespace {

int int_val(i64 x, u64 p)
{
    if (x == 0)
        return kInfiniteValuation;
    int v = 0;
    while (x % static_cast<i64>(p) == 0) {
        x /= static_cast<i64>(p);
        ++v;
    }
    return v;
}

int largest_precision(u64 p)
{
    int M = 0;
    u128 x = 1;
    while (x * p <= (u128{1} << 62)) {
        x *= p;
        ++M;
    }
    return M;
}

IntMatrix int_mul(const IntMatrix& a, const IntMatrix& b)
{
    const std::size_t u = a.size();
    IntMatrix c(u, std::vector<i64>(u, 0));
    for (std::size_t i = 0; i < u; ++i)
        for (std::size_t k = 0; k < u; ++k)
            if (a[i][k] != 0)
                for (std::size_t j = 0; j < u; ++j)
                    c[i][j] += a[i][k] * b[k][j];
    return c;
}

IntMatrix unit_matrix(std::size_t u, std::size_t a, std::size_t b, i64 value)
{
    IntMatrix m(u, std::vector<i64>(u, 0));
    m[a][b] = value;
    return m;
}

} // namespace

std::shared_ptr<const GroupChart> GroupChart::create(u64 p, std::vector<IntMatrix> basis, std::string name)
{
    if (!is_prime(p))
        throw ValidationError("p must be prime");
    if (p == 2)
        throw ValidationError("group charts require an odd prime");
    if (basis.empty())
        throw ValidationError("chart needs at least one basis matrix");
    const std::size_t u = basis[0].size();
    const std::size_t d = basis.size();
    std::shared_ptr<GroupChart> c(new GroupChart());
    c->p_ = p;
    c->u_ = u;
    c->name_ = std::move(name);
    c->omega_min_ = kInfiniteValuation;
    for (const auto& x : basis) {
        if (x.size() != u)
            throw ValidationError("basis matrices must share one size");
        int om = kInfiniteValuation;
        for (std::size_t i = 0; i < u; ++i) {
            if (x[i].size() != u)
                throw ValidationError("basis matrices must be square");
            for (std::size_t j = 0; j < u; ++j) {
                if (j <= i && x[i][j] != 0)
                    throw ValidationError("basis matrices must be strictly upper triangular");
                om = std::min(om, int_val(x[i][j], p));
            }
        }
        if (om == kInfiniteValuation)
            throw ValidationError("basis matrix is zero");
        if (om < 1)
            throw ValidationError("basis matrices must have entries divisible by p");
        c->omega_.push_back(om);
        c->omega_min_ = std::min(c->omega_min_, om);
    }
    c->basis_ = std::move(basis);

    // Left inverse of the flattening map on an invertible block of entries.
    RatMatrix at(d, RatRow(u * u));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t e = 0; e < u * u; ++e)
            at[i][e] = c->basis_[i][e / u][e % u];
    RatMatrix echelon = at;
    auto piv = detail::rref(echelon, u * u);
    if (piv.size() != d)
        throw ValidationError("basis matrices are linearly dependent");
    c->sel_ = piv;
    RatMatrix aug(d, RatRow(2 * d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            aug[j][i] = at[i][piv[j]]; // transpose of the block
            aug[j][d + j] = 1;
        }
    detail::rref(aug, d);
    // aug[:, d:] is the inverse of the transposed block, i.e. W.
    RatMatrix W(d, RatRow(d));
    int minv = 0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            W[i][j] = aug[i][d + j];
            if (W[i][j] != 0)
                minv = std::min(minv, detail::rat_val(W[i][j], p));
        }
    c->s_ = -minv;

    // Guard digits: exp divides by k! and log by k for k < u, lie_coords by
    // p^s. Products are exact mod p^M, so elimination rounds do not compound
    // the loss: every round reads coordinates off a matrix known to the
    // accuracy of exp_nilpotent.
    int loss_exp = static_cast<int>(legendre_factorial_val(u - 1, p));
    int loss_log = 0;
    for (std::size_t k = 1; k < u; ++k)
        loss_log = std::max(loss_log, vp(static_cast<i64>(k), p));
    const int M = largest_precision(p);
    c->mod_ = Modulus(p, M);
    c->reliable_ = M - (loss_exp + loss_log + c->s_) - 2;
    if (c->reliable_ < 6)
        throw PrecisionError("chart too large for 64-bit working precision");

    mpz_class ps;
    mpz_ui_pow_ui(ps.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(c->s_));
    c->wprime_.assign(d, Vec(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            c->wprime_[i][j] = detail::rat_residue(W[i][j] * ps, c->mod_);
    for (const auto& x : c->basis_) {
        Matrix r(u * u);
        for (std::size_t e = 0; e < u * u; ++e)
            r[e] = c->mod_.reduce(x[e / u][e % u]);
        c->basis_res_.push_back(std::move(r));
    }

    // Structure constants: solve with W over Q and demand integrality.
    c->structure_.assign(d * d * d, 0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            IntMatrix ab = int_mul(c->basis_[i], c->basis_[j]);
            IntMatrix ba = int_mul(c->basis_[j], c->basis_[i]);
            std::vector<Rat> lam(d);
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t t = 0; t < d; ++t) {
                    std::size_t e = piv[t];
                    lam[k] += W[k][t] * (ab[e / u][e % u] - ba[e / u][e % u]);
                }
            for (std::size_t e = 0; e < u * u; ++e) {
                Rat s = 0;
                for (std::size_t k = 0; k < d; ++k)
                    s += lam[k] * c->basis_[k][e / u][e % u];
                if (s != ab[e / u][e % u] - ba[e / u][e % u])
                    throw ValidationError("basis does not span a Lie lattice");
            }
            for (std::size_t k = 0; k < d; ++k) {
                if (lam[k].get_den() != 1)
                    throw ValidationError("structure constants are not integral");
                i64 v = lam[k].get_num().get_si();
                c->structure_[(i * d + j) * d + k] = v;
                if (v % static_cast<i64>(p) != 0)
                    c->powerful_ = false;
            }
        }

    // Without [L, L] in pL the group law leaves L once BCH denominators
    // reach p, which happens for matrices of size above p.
    if (!c->powerful_ && u > p)
        throw ValidationError("non-powerful lattice needs p >= matrix size");

    // Round trip on the generators and on one mixed element.
    for (std::size_t i = 0; i < d; ++i) {
        Vec beta(d, 0);
        beta[i] = 1;
        if (c->coordinates(c->element(beta)) != beta)
            throw ValidationError("inconsistent chart: generator does not round trip");
    }
    Vec mixed(d);
    for (std::size_t i = 0; i < d; ++i)
        mixed[i] = 1 + 2 * i;
    if (c->coordinates(c->element(mixed)) != mixed)
        throw ValidationError("inconsistent chart: coordinates do not round trip");
    return c;
}

std::shared_ptr<const GroupChart> GroupChart::zp(u64 p)
{
    return create(p, {unit_matrix(2, 0, 1, static_cast<i64>(p))}, "zp");
}

std::shared_ptr<const GroupChart> GroupChart::abelian(u64 p, std::size_t d)
{
    std::vector<IntMatrix> b;
    for (std::size_t i = 0; i < d; ++i)
        b.push_back(unit_matrix(d + 1, 0, i + 1, static_cast<i64>(p)));
    return create(p, b, "abelian");
}

std::shared_ptr<const GroupChart> GroupChart::heisenberg(u64 p)
{
    const i64 q = static_cast<i64>(p);
    return create(p, {unit_matrix(3, 0, 1, q), unit_matrix(3, 1, 2, q), unit_matrix(3, 0, 2, q * q)}, "heisenberg");
}

std::shared_ptr<const GroupChart> GroupChart::unitriangular(u64 p, std::size_t n)
{
    std::vector<IntMatrix> b;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = a + 1; c < n; ++c)
            b.push_back(unit_matrix(n, a, c, static_cast<i64>(p)));
    return create(p, b, "unitriangular");
}

std::shared_ptr<const GroupChart> GroupChart::graded_unitriangular(u64 p, std::size_t n)
{
    std::vector<IntMatrix> b;
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t a = 0; a + k < n; ++a)
            b.push_back(unit_matrix(n, a, a + k, static_cast<i64>(checked_pow(p, static_cast<int>(k)))));
    return create(p, b, "graded_unitriangular");
}

LiePresentation GroupChart::lie_presentation(int prec) const
{
    const std::size_t d = dim();
    std::vector<BracketTerm> terms;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k)
                if (i != j && structure_[(i * d + j) * d + k] != 0)
                    terms.push_back({i, j, k, structure_[(i * d + j) * d + k]});
    return LiePresentation(p_, d, prec, terms);
}

Matrix GroupChart::identity() const
{
    Matrix m(u_ * u_, 0);
    for (std::size_t i = 0; i < u_; ++i)
        m[i * u_ + i] = 1;
    return m;
}

Matrix GroupChart::mul(const Matrix& a, const Matrix& b) const
{
    // Upper triangular operands: only k in [i, j] contributes.
    Matrix c(u_ * u_, 0);
    for (std::size_t i = 0; i < u_; ++i)
        for (std::size_t j = i; j < u_; ++j) {
            u128 s = 0;
            for (std::size_t k = i; k <= j; ++k)
                s += static_cast<u128>(a[i * u_ + k]) * b[k * u_ + j] % mod_.value();
            c[i * u_ + j] = static_cast<u64>(s % mod_.value());
        }
    return c;
}

Matrix GroupChart::inverse(const Matrix& g) const
{
    // (I + N)^-1 = sum (-N)^k, a finite sum for nilpotent N.
    Matrix negn(u_ * u_);
    for (std::size_t e = 0; e < u_ * u_; ++e)
        negn[e] = mod_.neg(mod_.sub(g[e], e % (u_ + 1) == 0 ? 1 : 0));
    Matrix out = identity(), term = identity();
    for (std::size_t k = 1; k < u_; ++k) {
        term = mul(term, negn);
        for (std::size_t e = 0; e < u_ * u_; ++e)
            out[e] = mod_.add(out[e], term[e]);
    }
    return out;
}

Matrix GroupChart::pow(const Matrix& g, u64 e) const
{
    Matrix result = identity(), base = g;
    while (e > 0) {
        if (e & 1)
            result = mul(result, base);
        e >>= 1;
        if (e)
            base = mul(base, base);
    }
    return result;
}

Matrix GroupChart::lie_matrix(std::span<const u64> lambda) const
{
    Matrix X(u_ * u_, 0);
    for (std::size_t i = 0; i < dim(); ++i) {
        if (lambda[i] == 0)
            continue;
        for (std::size_t e = 0; e < u_ * u_; ++e)
            if (basis_res_[i][e] != 0)
                X[e] = mod_.add(X[e], mod_.mul(lambda[i], basis_res_[i][e]));
    }
    return X;
}

Vec GroupChart::lie_coords(const Matrix& X) const
{
    const std::size_t d = dim();
    Vec lam(d);
    for (std::size_t i = 0; i < d; ++i) {
        u64 acc = 0;
        for (std::size_t t = 0; t < d; ++t)
            acc = mod_.add(acc, mod_.mul(wprime_[i][t], X[sel_[t]]));
        try {
            lam[i] = mod_.exact_div_p(acc, s_);
        } catch (const PrecisionError&) {
            throw ValidationError("matrix is not in the span of the Lie basis");
        }
    }
    Matrix back = lie_matrix(lam);
    const u64 check = mod_.p_power(reliable_);
    for (std::size_t e = 0; e < u_ * u_; ++e)
        if (mod_.sub(back[e], X[e]) % check != 0)
            throw ValidationError("matrix is not in the span of the Lie basis");
    return lam;
}

Matrix GroupChart::exp_nilpotent(const Matrix& X) const
{
    Matrix out = identity(), power = identity();
    u64 unit_fact = 1;
    int v_fact = 0;
    for (std::size_t k = 1; k < u_; ++k) {
        power = mul(power, X);
        u64 kk = k;
        while (kk % p_ == 0) {
            kk /= p_;
            ++v_fact;
        }
        unit_fact = mod_.mul(unit_fact, kk % mod_.value());
        u64 inv = mod_.inv(unit_fact);
        for (std::size_t e = 0; e < u_ * u_; ++e)
            if (power[e] != 0)
                out[e] = mod_.add(out[e], mod_.mul(mod_.exact_div_p(power[e], v_fact), inv));
    }
    return out;
}

Matrix GroupChart::log_unipotent(const Matrix& g) const
{
    Matrix n(u_ * u_);
    for (std::size_t i = 0; i < u_; ++i)
        for (std::size_t j = 0; j < u_; ++j) {
            u64 x = mod_.sub(g[i * u_ + j], i == j ? 1 : 0);
            if (j <= i && x != 0)
                throw ValidationError("matrix is not unipotent upper triangular");
            n[i * u_ + j] = x;
        }
    Matrix out(u_ * u_, 0), power = identity();
    for (std::size_t k = 1; k < u_; ++k) {
        power = mul(power, n);
        u64 kk = k;
        int v = 0;
        while (kk % p_ == 0) {
            kk /= p_;
            ++v;
        }
        u64 inv = mod_.inv(kk);
        for (std::size_t e = 0; e < u_ * u_; ++e) {
            if (power[e] == 0)
                continue;
            u64 t = mod_.mul(mod_.exact_div_p(power[e], v), inv);
            out[e] = (k % 2 == 1) ? mod_.add(out[e], t) : mod_.sub(out[e], t);
        }
    }
    return out;
}

Matrix GroupChart::generator_power(std::size_t i, u64 e) const
{
    Matrix X(u_ * u_, 0);
    const u64 ee = mod_.reduce_u(e);
    for (std::size_t k = 0; k < u_ * u_; ++k)
        if (basis_res_[i][k] != 0)
            X[k] = mod_.mul(ee, basis_res_[i][k]);
    return exp_nilpotent(X);
}

Matrix GroupChart::element(std::span<const u64> beta) const
{
    Matrix g = identity();
    for (std::size_t i = 0; i < dim(); ++i)
        if (beta[i] != 0)
            g = mul(g, generator_power(i, beta[i]));
    return g;
}

Vec GroupChart::coordinates(const Matrix& g) const
{
    const std::size_t d = dim();
    const u64 R = mod_.p_power(reliable_);
    Vec beta(d);
    Matrix h = g;
    for (std::size_t i = 0; i < d; ++i) {
        Vec lam = lie_coords(log_unipotent(h));
        beta[i] = lam[i] % R;
        if (beta[i] != 0)
            h = mul(generator_power(i, mod_.neg(beta[i])), h);
    }
    if (!equal_at(h, identity(), reliable_))
        throw ValidationError("inconsistent chart: successive elimination leaves a residue");
    return beta;
}

bool GroupChart::equal_at(const Matrix& a, const Matrix& b, int prec) const
{
    const u64 q = mod_.p_power(prec);
    for (std::size_t e = 0; e < a.size(); ++e)
        if (mod_.sub(a[e], b[e]) % q != 0)
            return false;
    return true;
}

// ---------------------------------------------------------------- elements

GroupElement::GroupElement(ChartPtr chart, Matrix m) : chart_(std::move(chart)), m_(std::move(m))
{
    if (m_.size() != chart_->size() * chart_->size())
        throw ValidationError("matrix size does not match chart");
}

GroupElement GroupElement::identity(ChartPtr chart)
{
    Matrix m = chart->identity();
    return GroupElement(std::move(chart), std::move(m));
}

GroupElement GroupElement::generator(ChartPtr chart, std::size_t i)
{
    if (i >= chart->dim())
        throw ValidationError("generator index out of range");
    Matrix m = chart->generator_power(i, 1);
    return GroupElement(std::move(chart), std::move(m));
}

GroupElement GroupElement::from_coordinates(ChartPtr chart, std::span<const u64> beta)
{
    if (beta.size() != chart->dim())
        throw ValidationError("coordinate vector has the wrong length");
    Matrix m = chart->element(beta);
    return GroupElement(std::move(chart), std::move(m));
}

GroupElement GroupElement::exp(ChartPtr chart, std::span<const u64> lambda)
{
    if (lambda.size() != chart->dim())
        throw ValidationError("Lie vector has the wrong length");
    Matrix m = chart->exp_nilpotent(chart->lie_matrix(lambda));
    return GroupElement(std::move(chart), std::move(m));
}

Vec GroupElement::coordinates(int n) const
{
    if (n > chart_->reliable_prec())
        throw PrecisionError("requested coordinates beyond the chart's reliable precision");
    Vec b = coordinates();
    const u64 q = checked_pow(chart_->p(), n);
    for (auto& x : b)
        x %= q;
    return b;
}

int GroupElement::omega() const
{
    Matrix l = chart_->log_unipotent(m_);
    int best = kInfiniteValuation;
    for (auto x : l)
        best = std::min(best, chart_->working().val(x));
    return best >= chart_->reliable_prec() ? kInfiniteValuation : best;
}

bool GroupElement::is_identity() const
{
    return chart_->equal_at(m_, chart_->identity(), chart_->reliable_prec());
}

GroupElement GroupElement::operator*(const GroupElement& o) const
{
    if (chart_ != o.chart_)
        throw ValidationError("elements belong to different charts");
    return GroupElement(chart_, chart_->mul(m_, o.m_));
}

GroupElement GroupElement::inverse() const
{
    return GroupElement(chart_, chart_->inverse(m_));
}

GroupElement GroupElement::pow(u64 e) const
{
    return GroupElement(chart_, chart_->pow(m_, e));
}

bool GroupElement::operator==(const GroupElement& o) const
{
    return chart_ == o.chart_ && chart_->equal_at(m_, o.m_, chart_->reliable_prec());
}

GroupElement commutator(const GroupElement& a, const GroupElement& b)
{
    return a * b * a.inverse() * b.inverse();
}

} // namespace iwasawa
