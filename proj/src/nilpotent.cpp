#include "iwasawa/nilpotent.hpp"

#include <algorithm>
#include <sstream>

#include "rational.hpp"

namespace iwasawa {

namespace detail {
struct RationalBasis {
    RatMatrix rows;
};
} // namespace detail

using detail::Rat;
using detail::RatMatrix;
using detail::RatRow;

LiePresentation::LiePresentation(u64 p, std::size_t dim, int prec, const std::vector<BracketTerm>& terms)
    : p_(p), dim_(dim), prec_(prec), c_(dim * dim * dim, 0), listed_(dim * dim, false)
{
    if (!is_prime(p))
        throw ValidationError("p must be prime");
    if (dim == 0)
        throw ValidationError("dimension must be positive");
    if (prec < 1)
        throw ValidationError("precision must be positive");
    for (const auto& t : terms) {
        if (t.i >= dim || t.j >= dim || t.k >= dim)
            throw ValidationError("bracket index out of range");
        c_[(t.i * dim + t.j) * dim + t.k] += t.coeff;
        listed_[t.i * dim + t.j] = true;
    }
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            if (listed_[i * dim + j] && !listed_[j * dim + i])
                for (std::size_t k = 0; k < dim; ++k)
                    c_[(j * dim + i) * dim + k] = -c_[(i * dim + j) * dim + k];
}

LiePresentation LiePresentation::strictly_upper_triangular(u64 p, std::size_t n, int prec)
{
    std::vector<std::pair<std::size_t, std::size_t>> pos;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            pos.emplace_back(a, b);
    auto index = [&](std::size_t a, std::size_t b) {
        return static_cast<std::size_t>(std::find(pos.begin(), pos.end(), std::make_pair(a, b)) - pos.begin());
    };
    // [pE_ab, pE_cd] = p * (p E_ad) when b = c.
    std::vector<BracketTerm> terms;
    for (std::size_t u = 0; u < pos.size(); ++u)
        for (std::size_t v = 0; v < pos.size(); ++v) {
            auto [a, b] = pos[u];
            auto [c, d] = pos[v];
            if (b == c)
                terms.push_back({u, v, index(a, d), static_cast<i64>(p)});
            if (d == a)
                terms.push_back({u, v, index(c, b), -static_cast<i64>(p)});
        }
    // Every ordered pair is listed, so no completion happens.
    std::vector<BracketTerm> all = terms;
    LiePresentation L(p, pos.size(), prec, all);
    for (std::size_t i = 0; i < L.dim_; ++i)
        for (std::size_t j = 0; j < L.dim_; ++j)
            L.listed_[i * L.dim_ + j] = true;
    return L;
}

LiePresentation LiePresentation::abelian(u64 p, std::size_t dim, int prec)
{
    return LiePresentation(p, dim, prec, {});
}

std::vector<i64> LiePresentation::bracket(std::span<const i64> x, std::span<const i64> y) const
{
    std::vector<i64> out(dim_, 0);
    for (std::size_t i = 0; i < dim_; ++i) {
        if (x[i] == 0)
            continue;
        for (std::size_t j = 0; j < dim_; ++j) {
            if (y[j] == 0)
                continue;
            for (std::size_t k = 0; k < dim_; ++k)
                out[k] += x[i] * y[j] * c(i, j, k);
        }
    }
    return out;
}

namespace {

RatRow rat_bracket(const LiePresentation& L, const RatRow& x, const RatRow& y)
{
    const std::size_t d = L.dim();
    RatRow out(d);
    for (std::size_t i = 0; i < d; ++i) {
        if (x[i] == 0)
            continue;
        for (std::size_t j = 0; j < d; ++j) {
            if (y[j] == 0)
                continue;
            Rat xy = x[i] * y[j];
            for (std::size_t k = 0; k < d; ++k)
                if (L.c(i, j, k) != 0)
                    out[k] += xy * L.c(i, j, k);
        }
    }
    return out;
}

RatRow unit(std::size_t d, std::size_t i)
{
    RatRow v(d);
    v[i] = 1;
    return v;
}

std::string one_based(std::initializer_list<std::size_t> idx)
{
    std::ostringstream os;
    os << "(";
    bool first = true;
    for (auto i : idx) {
        os << (first ? "" : ",") << i + 1;
        first = false;
    }
    os << ")";
    return os.str();
}

} // namespace

LieReport validate(const LiePresentation& L)
{
    LieReport r;
    const std::size_t d = L.dim();
    const Modulus mod = L.modulus();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) {
                bool bad = (i == j) ? mod.reduce(L.c(i, i, k)) != 0
                                    : mod.reduce(L.c(i, j, k) + L.c(j, i, k)) != 0;
                if (bad) {
                    r.antisymmetric = false;
                    r.violations.push_back({"antisymmetry", {i, j, k},
                                            "c" + one_based({i, j}) + " and c" + one_based({j, i}) +
                                                " disagree in x" + std::to_string(k + 1)});
                }
                if (L.c(i, j, k) % static_cast<i64>(L.p()) != 0)
                    r.powerful = false;
            }

    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            for (std::size_t l = j + 1; l < d; ++l) {
                RatRow xi = unit(d, i), xj = unit(d, j), xl = unit(d, l);
                RatRow a = rat_bracket(L, rat_bracket(L, xi, xj), xl);
                RatRow b = rat_bracket(L, rat_bracket(L, xj, xl), xi);
                RatRow c = rat_bracket(L, rat_bracket(L, xl, xi), xj);
                for (std::size_t k = 0; k < d; ++k) {
                    Rat s = a[k] + b[k] + c[k];
                    if (detail::rat_residue(s, mod) != 0) {
                        r.jacobi = false;
                        r.violations.push_back({"jacobi", {i, j, l},
                                                "Jacobi sum for x" + one_based({i, j, l}) +
                                                    " is nonzero in x" + std::to_string(k + 1)});
                        break;
                    }
                }
            }

    // Lower central series over Q.
    RatMatrix cur;
    for (std::size_t i = 0; i < d; ++i)
        cur.push_back(unit(d, i));
    std::size_t steps = 0;
    while (!cur.empty() && steps <= d) {
        RatMatrix next;
        for (const auto& v : cur)
            for (std::size_t j = 0; j < d; ++j)
                next.push_back(rat_bracket(L, v, unit(d, j)));
        detail::rref(next, d);
        cur = std::move(next);
        ++steps;
    }
    if (!cur.empty()) {
        r.nilpotent = false;
        r.violations.push_back({"nilpotent", {}, "lower central series does not reach 0"});
    }
    return r;
}

std::string LieReport::to_string() const
{
    std::ostringstream os;
    os << (valid() ? "valid" : "invalid");
    if (!powerful)
        os << " (not powerful)";
    for (const auto& v : violations)
        os << "\n  " << v.kind << ": " << v.detail;
    return os.str();
}

// ---------------------------------------------------------------- Submodule

Submodule::Submodule(Modulus mod, std::size_t dim) : dim_(dim), form_(mod, dim), saturated_(true)
{
    rational_ = std::make_shared<detail::RationalBasis>();
}

Submodule Submodule::from_rational(Modulus mod, std::size_t dim, std::shared_ptr<const detail::RationalBasis> rb)
{
    Submodule s(mod, dim);
    for (const auto& row : rb->rows) {
        Vec v(dim);
        for (std::size_t i = 0; i < dim; ++i)
            v[i] = detail::rat_residue(row[i], mod);
        s.form_.insert(std::move(v));
    }
    s.form_.canonicalize();
    s.saturated_ = s.form_.is_free() && s.form_.nrows() == rb->rows.size();
    s.rational_ = std::move(rb);
    return s;
}

Submodule Submodule::full(Modulus mod, std::size_t dim)
{
    std::vector<std::size_t> idx(dim);
    for (std::size_t i = 0; i < dim; ++i)
        idx[i] = i;
    return coordinate_span(mod, dim, idx);
}

Submodule Submodule::coordinate_span(Modulus mod, std::size_t dim, const std::vector<std::size_t>& idx)
{
    auto rb = std::make_shared<detail::RationalBasis>();
    auto sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (auto i : sorted) {
        if (i >= dim)
            throw ValidationError("coordinate index out of range");
        rb->rows.push_back(unit(dim, i));
    }
    return from_rational(mod, dim, rb);
}

Submodule Submodule::from_rows(Modulus mod, std::size_t dim, const std::vector<Vec>& rows)
{
    Submodule s(mod, dim);
    for (const auto& r : rows) {
        if (r.size() != dim)
            throw ValidationError("row length does not match dimension");
        s.form_.insert(r);
    }
    s.form_.canonicalize();
    s.saturated_ = false;
    s.rational_.reset();
    return s;
}

bool Submodule::is_subset_of(const Submodule& other) const
{
    for (const auto& r : form_.rows())
        if (!other.contains(r))
            return false;
    return true;
}

bool Submodule::is_coordinate_span(std::vector<std::size_t>* idx) const
{
    std::vector<std::size_t> out;
    for (const auto& r : form_.canonical_rows()) {
        std::size_t nz = 0, at = 0;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (r[i] != 0) {
                ++nz;
                at = i;
            }
        if (nz != 1 || r[at] != 1)
            return false;
        out.push_back(at);
    }
    if (idx)
        *idx = out;
    return true;
}

std::string Submodule::to_string(const std::string& var) const
{
    std::ostringstream os;
    std::vector<std::size_t> idx;
    if (is_coordinate_span(&idx)) {
        if (idx.size() == dim_ && dim_ > 0)
            return "L";
        os << "span{";
        for (std::size_t i = 0; i < idx.size(); ++i)
            os << (i ? "," : "") << var << idx[i] + 1;
        os << "}";
        return os.str();
    }
    os << "span{";
    bool first = true;
    for (const auto& r : form_.canonical_rows()) {
        os << (first ? "" : ", ") << "(";
        for (std::size_t i = 0; i < r.size(); ++i)
            os << (i ? " " : "") << r[i];
        os << ")";
        first = false;
    }
    os << "} mod " << modulus().p() << "^" << modulus().precision();
    return os.str();
}

// ---------------------------------------------------------------- series

namespace {

struct Quotienting {
    RatMatrix rows; // RREF of the subspace
    std::vector<std::size_t> pivots;
    std::vector<std::size_t> free_cols;

    Quotienting(RatMatrix w, std::size_t d) : rows(std::move(w))
    {
        pivots = detail::rref(rows, d);
        std::vector<bool> is_p(d, false);
        for (auto c : pivots)
            is_p[c] = true;
        for (std::size_t c = 0; c < d; ++c)
            if (!is_p[c])
                free_cols.push_back(c);
    }

    // Coordinates of v modulo the subspace, on the non-pivot columns.
    RatRow reduce(RatRow v) const
    {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            Rat f = v[pivots[r]];
            if (f == 0)
                continue;
            for (std::size_t c = 0; c < v.size(); ++c)
                v[c] -= f * rows[r][c];
        }
        RatRow out;
        out.reserve(free_cols.size());
        for (auto c : free_cols)
            out.push_back(v[c]);
        return out;
    }
};

Submodule saturated_kernel(const LiePresentation& L, const RatMatrix& targets, const RatMatrix& modulo)
{
    const std::size_t d = L.dim();
    Quotienting q(modulo, d);
    const std::size_t m = targets.size() * q.free_cols.size();
    RatMatrix a(d, RatRow(m));
    for (std::size_t i = 0; i < d; ++i) {
        RatRow xi = unit(d, i);
        std::size_t col = 0;
        for (const auto& t : targets) {
            RatRow red = q.reduce(rat_bracket(L, xi, t));
            for (const auto& x : red)
                a[i][col++] = x;
        }
    }
    auto rb = std::make_shared<detail::RationalBasis>();
    rb->rows = detail::saturate(detail::left_null_space(a, d, m), d, L.p());
    return Submodule::from_rational(L.modulus(), d, rb);
}

const RatMatrix& rows_of(const Submodule& S)
{
    if (!S.rational())
        throw ValidationError("submodule has no exact basis");
    return S.rational()->rows;
}

} // namespace

std::vector<Submodule> upper_central_series(const LiePresentation& L)
{
    const std::size_t d = L.dim();
    RatMatrix all;
    for (std::size_t i = 0; i < d; ++i)
        all.push_back(unit(d, i));
    std::vector<Submodule> series{Submodule::zero(L.modulus(), d)};
    while (series.back().rank() < d || !series.back().is_free()) {
        if (series.size() > d + 1)
            throw ValidationError("upper central series does not terminate: algebra is not nilpotent");
        Submodule next = saturated_kernel(L, all, rows_of(series.back()));
        if (rows_of(next).size() == rows_of(series.back()).size())
            throw ValidationError("upper central series stalls below L: algebra is not nilpotent");
        series.push_back(std::move(next));
    }
    return series;
}

Submodule centralizer(const LiePresentation& L, const Submodule& S)
{
    if (S.ambient_dim() != L.dim())
        throw ValidationError("dimension mismatch between algebra and submodule");
    return saturated_kernel(L, rows_of(S), {});
}

LiePresentation sublattice_presentation(const LiePresentation& L, const std::vector<int>& e)
{
    const std::size_t d = L.dim();
    if (e.size() != d)
        throw ValidationError("exponent vector has the wrong length");
    std::vector<BracketTerm> terms;
    const i64 p = static_cast<i64>(L.p());
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) {
                i64 c = L.c(i, j, k);
                if (c == 0)
                    continue;
                int s = e[i] + e[j] - e[k];
                for (; s > 0; --s)
                    c *= p;
                for (; s < 0; ++s) {
                    if (c % p != 0)
                        throw ValidationError("sublattice is not closed under the bracket");
                    c /= p;
                }
                terms.push_back({i, j, k, c});
            }
    LiePresentation U(L.p(), d, L.prec(), terms);
    return U;
}

bool centraliser_compat(const LiePresentation& L, const std::vector<int>& e)
{
    const std::size_t d = L.dim();
    auto series = upper_central_series(L);
    const int cls = static_cast<int>(series.size()) - 1;
    int emax = 0;
    for (int x : e) {
        if (x < 0)
            throw ValidationError("exponents must be nonnegative");
        emax = std::max(emax, x);
    }
    if (L.prec() <= emax + cls)
        throw PrecisionError("precision must exceed the largest exponent plus the nilpotency class");

    LiePresentation U = sublattice_presentation(L, e);
    auto useries = upper_central_series(U);
    const Submodule& z2u = useries[std::min<std::size_t>(2, useries.size() - 1)];
    Submodule lhs = centralizer(U, z2u);

    // C_G(Z_2(G)) rewritten in the basis p^{e_i} x_i, then intersected with
    // the lattice of U, which is saturation in these coordinates.
    Submodule cg = centralizer(L, series[std::min<std::size_t>(2, series.size() - 1)]);
    RatMatrix rows = rows_of(cg);
    for (auto& r : rows)
        for (std::size_t i = 0; i < d; ++i) {
            mpz_class pe;
            mpz_ui_pow_ui(pe.get_mpz_t(), static_cast<unsigned long>(L.p()), static_cast<unsigned long>(e[i]));
            r[i] /= pe;
        }
    auto rb = std::make_shared<detail::RationalBasis>();
    rb->rows = detail::saturate(rows, d, L.p());
    Submodule rhs = Submodule::from_rational(L.modulus(), d, rb);
    return lhs == rhs;
}

} // namespace iwasawa
