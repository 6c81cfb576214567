#include "iwasawa/algebra.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace iwasawa {

// ---------------------------------------------------------------- quotient

std::shared_ptr<const QuotientGroup> QuotientGroup::build(ChartPtr chart, int n, QuotientOptions opts)
{
    if (n < 1)
        throw ValidationError("level n must be positive");
    if (n > chart->reliable_prec())
        throw PrecisionError("level exceeds the chart's reliable precision");
    std::shared_ptr<QuotientGroup> q(new QuotientGroup());
    q->chart_ = std::move(chart);
    q->n_ = n;
    q->side_ = checked_pow(q->p(), n);
    const std::size_t d = q->dim();
    u128 order = 1;
    for (std::size_t i = 0; i < d; ++i) {
        q->strides_.push_back(static_cast<std::size_t>(order));
        order *= q->side_;
        if (order > opts.size_budget)
            throw BudgetError("quotient of order p^" + std::to_string(n * static_cast<int>(d)) +
                              " exceeds the size budget of " + std::to_string(opts.size_budget));
    }
    q->order_ = static_cast<std::size_t>(order);
    const std::size_t N = q->order_;
    const std::size_t levels = static_cast<std::size_t>(n);

    if (N <= opts.generator_table_budget) {
        q->right_.assign(d * levels * N, 0);
        for (std::size_t i = 0; i < d; ++i) {
            Matrix gi = q->chart_->generator_power(i, 1);
            std::uint32_t* r0 = &q->right_[(i * levels) * N];
            for (std::size_t x = 0; x < N; ++x) {
                Vec beta = q->coords(x);
                Matrix m = q->chart_->mul(q->chart_->element(beta), gi);
                Vec c = q->chart_->coordinates(m);
                for (auto& v : c)
                    v %= q->side_;
                r0[x] = static_cast<std::uint32_t>(q->index(c));
            }
            for (std::size_t j = 1; j < levels; ++j) {
                const std::uint32_t* prev = &q->right_[(i * levels + j - 1) * N];
                std::uint32_t* cur = &q->right_[(i * levels + j) * N];
                for (std::size_t x = 0; x < N; ++x) {
                    std::uint32_t y = static_cast<std::uint32_t>(x);
                    for (u64 t = 0; t < q->p(); ++t)
                        y = prev[y];
                    cur[x] = y;
                }
            }
        }
    }
    if (N <= opts.table_budget) {
        std::vector<std::uint32_t> table(N * N);
        for (std::size_t a = 0; a < N; ++a)
            for (std::size_t b = 0; b < N; ++b)
                table[a * N + b] = static_cast<std::uint32_t>(q->mul(a, b));
        q->table_ = std::move(table);
    }
    q->verify(opts.seed);
    return q;
}

std::size_t QuotientGroup::index(std::span<const u64> beta) const
{
    std::size_t idx = 0;
    for (std::size_t i = 0; i < dim(); ++i)
        idx += static_cast<std::size_t>(beta[i] % side_) * strides_[i];
    return idx;
}

Vec QuotientGroup::coords(std::size_t idx) const
{
    Vec b(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        b[i] = idx % side_;
        idx /= side_;
    }
    return b;
}

u64 QuotientGroup::coord(std::size_t idx, std::size_t i) const
{
    return (idx / strides_[i]) % side_;
}

std::size_t QuotientGroup::mul_generator_power(std::size_t a, std::size_t i, u64 e) const
{
    e %= side_;
    if (e == 0)
        return a;
    if (right_.empty()) {
        Matrix m = chart_->mul(chart_->element(coords(a)), chart_->generator_power(i, e));
        Vec c = chart_->coordinates(m);
        for (auto& v : c)
            v %= side_;
        return index(c);
    }
    const std::size_t levels = static_cast<std::size_t>(n_);
    for (std::size_t j = 0; j < levels && e > 0; ++j) {
        u64 digit = e % p();
        e /= p();
        const std::uint32_t* r = &right_[(i * levels + j) * order_];
        for (u64 t = 0; t < digit; ++t)
            a = r[a];
    }
    return a;
}

std::size_t QuotientGroup::mul_by_matrices(std::size_t a, std::size_t b) const
{
    Matrix m = chart_->mul(chart_->element(coords(a)), chart_->element(coords(b)));
    Vec c = chart_->coordinates(m);
    for (auto& v : c)
        v %= side_;
    return index(c);
}

std::size_t QuotientGroup::mul(std::size_t a, std::size_t b) const
{
    if (!table_.empty())
        return table_[a * order_ + b];
    if (right_.empty())
        return mul_by_matrices(a, b);
    for (std::size_t i = 0; i < dim(); ++i)
        a = mul_generator_power(a, i, coord(b, i));
    return a;
}

std::size_t QuotientGroup::inv(std::size_t a) const
{
    std::size_t x = 0;
    for (std::size_t i = dim(); i-- > 0;)
        x = mul_generator_power(x, i, (side_ - coord(a, i)) % side_);
    return x;
}

std::size_t QuotientGroup::pow(std::size_t a, u64 e) const
{
    std::size_t result = 0, base = a;
    while (e > 0) {
        if (e & 1)
            result = mul(result, base);
        e >>= 1;
        if (e)
            base = mul(base, base);
    }
    return result;
}

std::size_t QuotientGroup::index_of(const GroupElement& g) const
{
    if (g.chart_ptr() != chart_)
        throw ValidationError("element belongs to a different chart");
    return index(g.coordinates(n_));
}

GroupElement QuotientGroup::element(std::size_t idx) const
{
    Vec b = coords(idx);
    return GroupElement::from_coordinates(chart_, b);
}

void QuotientGroup::verify(std::uint64_t seed)
{
    const std::size_t N = order_;
    const bool cheap = !table_.empty() || !right_.empty();
    std::mt19937_64 rng(seed);
    auto pick = [&] { return static_cast<std::size_t>(rng() % N); };
    const std::size_t samples = cheap ? 20000 : 60;

    auto check_unit_inverse = [&](std::size_t a) {
        if (mul(0, a) != a || mul(a, 0) != a)
            throw InvariantViolation("quotient identity law fails");
        if (mul(a, inv(a)) != 0)
            throw InvariantViolation("quotient inverse law fails");
    };
    if (cheap && N <= 100000)
        for (std::size_t a = 0; a < N; ++a)
            check_unit_inverse(a);
    else
        for (std::size_t t = 0; t < samples; ++t)
            check_unit_inverse(pick());

    const u128 cube = static_cast<u128>(N) * N * N;
    if (!table_.empty() && cube <= 20000000) {
        for (std::size_t a = 0; a < N; ++a)
            for (std::size_t b = 0; b < N; ++b) {
                std::size_t ab = table_[a * N + b];
                for (std::size_t c = 0; c < N; ++c)
                    if (table_[ab * N + c] != table_[a * N + table_[b * N + c]])
                        throw InvariantViolation("quotient multiplication is not associative");
            }
        fully_verified_ = true;
    } else {
        for (std::size_t t = 0; t < samples; ++t) {
            std::size_t a = pick(), b = pick(), c = pick();
            if (mul(mul(a, b), c) != mul(a, mul(b, c)))
                throw InvariantViolation("quotient multiplication is not associative");
        }
    }
}

// ---------------------------------------------------------------- elements

AlgebraElement::AlgebraElement(QuotientPtr q, Modulus mod) : q_(std::move(q)), mod_(mod), c_(q_->order(), 0)
{
    if (mod.p() != q_->p())
        throw ValidationError("coefficient prime differs from the group prime");
}

AlgebraElement::AlgebraElement(QuotientPtr q, Modulus mod, Vec coeffs) : q_(std::move(q)), mod_(mod), c_(std::move(coeffs))
{
    if (mod.p() != q_->p())
        throw ValidationError("coefficient prime differs from the group prime");
    if (c_.size() != q_->order())
        throw ValidationError("coefficient vector length differs from the group order");
    for (auto& x : c_)
        x = mod_.reduce_u(x);
}

AlgebraElement AlgebraElement::scalar(QuotientPtr q, Modulus mod, i64 c)
{
    AlgebraElement x(std::move(q), mod);
    x.c_[0] = mod.reduce(c);
    return x;
}

AlgebraElement AlgebraElement::group(QuotientPtr q, Modulus mod, std::size_t idx)
{
    AlgebraElement x(std::move(q), mod);
    if (idx >= x.c_.size())
        throw ValidationError("group index out of range");
    x.c_[idx] = mod.reduce(1);
    return x;
}

AlgebraElement AlgebraElement::b(QuotientPtr q, Modulus mod, std::size_t i)
{
    if (i >= q->dim())
        throw ValidationError("generator index out of range");
    std::size_t g = q->generator(i);
    AlgebraElement x(std::move(q), mod);
    x.c_[g] = mod.reduce(1);
    x.c_[0] = mod.sub(x.c_[0], 1);
    return x;
}

bool AlgebraElement::is_zero() const
{
    return std::all_of(c_.begin(), c_.end(), [](u64 v) { return v == 0; });
}

std::vector<std::size_t> AlgebraElement::support() const
{
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (c_[i] != 0)
            s.push_back(i);
    return s;
}

void AlgebraElement::check_compatible(const AlgebraElement& o) const
{
    if (q_ != o.q_)
        throw ValidationError("elements live in different quotients");
    if (!(mod_ == o.mod_))
        throw ValidationError("elements have different coefficient precision");
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const
{
    check_compatible(o);
    AlgebraElement r = *this;
    for (std::size_t i = 0; i < c_.size(); ++i)
        r.c_[i] = mod_.add(c_[i], o.c_[i]);
    return r;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const
{
    check_compatible(o);
    AlgebraElement r = *this;
    for (std::size_t i = 0; i < c_.size(); ++i)
        r.c_[i] = mod_.sub(c_[i], o.c_[i]);
    return r;
}

AlgebraElement AlgebraElement::operator-() const
{
    AlgebraElement r = *this;
    for (auto& x : r.c_)
        x = mod_.neg(x);
    return r;
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& o) const
{
    check_compatible(o);
    AlgebraElement r(q_, mod_);
    auto sa = support(), sb = o.support();
    for (auto a : sa)
        for (auto b : sb) {
            std::size_t ab = q_->mul(a, b);
            r.c_[ab] = mod_.add(r.c_[ab], mod_.mul(c_[a], o.c_[b]));
        }
    return r;
}

AlgebraElement AlgebraElement::scaled(u64 s) const
{
    AlgebraElement r = *this;
    s = mod_.reduce_u(s);
    for (auto& x : r.c_)
        x = mod_.mul(x, s);
    return r;
}

AlgebraElement AlgebraElement::right_translate(std::size_t g) const
{
    AlgebraElement r(q_, mod_);
    for (std::size_t h = 0; h < c_.size(); ++h)
        if (c_[h] != 0)
            r.c_[q_->mul(h, g)] = c_[h];
    return r;
}

AlgebraElement AlgebraElement::left_translate(std::size_t g) const
{
    AlgebraElement r(q_, mod_);
    for (std::size_t h = 0; h < c_.size(); ++h)
        if (c_[h] != 0)
            r.c_[q_->mul(g, h)] = c_[h];
    return r;
}

AlgebraElement AlgebraElement::pow(u64 e) const
{
    AlgebraElement result = one(q_, mod_), base = *this;
    while (e > 0) {
        if (e & 1)
            result = result * base;
        e >>= 1;
        if (e)
            base = base * base;
    }
    return result;
}

bool AlgebraElement::operator==(const AlgebraElement& o) const
{
    return q_ == o.q_ && mod_ == o.mod_ && c_ == o.c_;
}

std::string AlgebraElement::to_string() const
{
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0)
            continue;
        os << (first ? "" : " + ") << c_[i];
        if (i != 0) {
            os << "*g^(";
            Vec b = q_->coords(i);
            for (std::size_t k = 0; k < b.size(); ++k)
                os << (k ? "," : "") << b[k];
            os << ")";
        }
        first = false;
    }
    return first ? "0" : os.str();
}

AlgebraElement b_monomial(QuotientPtr q, Modulus mod, std::span<const u64> alpha, u64 degree_budget)
{
    if (alpha.size() != q->dim())
        throw ValidationError("multi-index has the wrong length");
    u64 deg = 0;
    for (auto a : alpha)
        deg += a;
    if (deg > degree_budget)
        throw BudgetError("b-monomial degree exceeds the budget");
    AlgebraElement x = AlgebraElement::one(q, mod);
    for (std::size_t i = 0; i < alpha.size(); ++i)
        for (u64 t = 0; t < alpha[i]; ++t)
            x = x.right_translate(q->generator(i)) - x;
    return x;
}

// ---------------------------------------------------------------- filtration

namespace {

std::vector<Vec> pascal(u64 side, const Modulus& mod)
{
    std::vector<Vec> c(side, Vec(side, 0));
    for (u64 b = 0; b < side; ++b) {
        c[b][0] = mod.reduce(1);
        for (u64 a = 1; a <= b; ++a)
            c[b][a] = mod.add(c[b - 1][a - 1], a < b ? c[b - 1][a] : 0);
    }
    return c;
}

} // namespace

Vec b_expansion(const AlgebraElement& x)
{
    const QuotientGroup& q = x.quotient();
    const Modulus& mod = x.modulus();
    const u64 side = q.side();
    const std::size_t d = q.dim(), N = q.order();
    auto binom = pascal(side, mod);
    auto supp = x.support();

    // Sparse route when the support's down-sets are small.
    u128 sparse_cost = 0;
    for (auto s : supp) {
        u128 c = 1;
        for (std::size_t i = 0; i < d; ++i)
            c *= q.coord(s, i) + 1;
        sparse_cost += c;
    }
    Vec lam(N, 0);
    if (sparse_cost * 4 < static_cast<u128>(N) * side * d) {
        for (auto s : supp) {
            Vec beta = q.coords(s);
            Vec alpha(d, 0);
            while (true) {
                u64 c = x.coeff(s);
                for (std::size_t i = 0; i < d && c != 0; ++i)
                    c = mod.mul(c, binom[beta[i]][alpha[i]]);
                std::size_t ai = q.index(alpha);
                lam[ai] = mod.add(lam[ai], c);
                std::size_t i = 0;
                while (i < d && alpha[i] == beta[i])
                    alpha[i++] = 0;
                if (i == d)
                    break;
                ++alpha[i];
            }
        }
        return lam;
    }
    lam = x.coeffs();
    Vec line(side), out(side);
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t stride = q.generator(i);
        for (std::size_t base = 0; base < N; ++base) {
            if (q.coord(base, i) != 0)
                continue;
            bool any = false;
            for (u64 b = 0; b < side; ++b) {
                line[b] = lam[base + b * stride];
                any = any || line[b] != 0;
            }
            if (!any)
                continue;
            for (u64 a = 0; a < side; ++a) {
                u128 acc = 0;
                for (u64 b = a; b < side; ++b)
                    if (line[b] != 0)
                        acc += static_cast<u128>(binom[b][a]) * line[b] % mod.value();
                out[a] = static_cast<u64>(acc % mod.value());
            }
            for (u64 a = 0; a < side; ++a)
                lam[base + a * stride] = out[a];
        }
    }
    return lam;
}

long FiltValue::lower_bound() const
{
    return kind == FiltKind::Zero ? std::numeric_limits<long>::max() : value;
}

std::string FiltValue::to_string() const
{
    switch (kind) {
    case FiltKind::Exact:
        return std::to_string(value);
    case FiltKind::AtLeast:
        return ">=" + std::to_string(value);
    case FiltKind::Zero:
        break;
    }
    return "inf";
}

std::string FiltValue::status() const
{
    switch (kind) {
    case FiltKind::Exact:
        return "exact";
    case FiltKind::AtLeast:
        return ">=floor";
    case FiltKind::Zero:
        break;
    }
    return "zero";
}

bool consistent(const FiltValue& a, const FiltValue& b)
{
    if (a.is_exact() && b.is_exact())
        return a.value == b.value;
    if (a.is_exact())
        return b.kind == FiltKind::AtLeast && a.value >= b.value;
    if (b.is_exact())
        return a.kind == FiltKind::AtLeast && b.value >= a.value;
    return true;
}

bool consistent_ge(const FiltValue& a, long b)
{
    return !a.is_exact() || a.value >= b;
}

long precision_floor(const QuotientGroup& q, const Modulus& mod)
{
    const long om = q.chart().omega_min();
    if (mod.precision() == 1)
        return static_cast<long>(q.side()) * om;
    return std::min<long>(mod.precision(), q.level() + om);
}

FiltValue lazard_value(const AlgebraElement& x, long degree_cap)
{
    if (x.is_zero())
        return FiltValue::zero();
    const QuotientGroup& q = x.quotient();
    const Modulus& mod = x.modulus();
    const bool charp = mod.precision() == 1;
    const long floor = precision_floor(q, mod);
    const auto& om = q.chart().omega();
    Vec lam = b_expansion(x);
    long best = std::numeric_limits<long>::max();
    for (std::size_t a = 0; a < lam.size(); ++a) {
        if (lam[a] == 0)
            continue;
        long weight = 0, degree = 0;
        std::size_t rest = a;
        for (std::size_t i = 0; i < q.dim(); ++i) {
            long ai = static_cast<long>(rest % q.side());
            rest /= q.side();
            weight += ai * om[i];
            degree += ai;
        }
        if (degree_cap >= 0 && degree > degree_cap)
            throw BudgetError("b-expansion needs degree " + std::to_string(degree) + " above the cap " +
                              std::to_string(degree_cap));
        long w = charp ? weight : weight + mod.val(lam[a]);
        best = std::min(best, w);
    }
    if (best < floor)
        return FiltValue::exact(best);
    return FiltValue::at_least(floor);
}

LemmaValueResult lemma_value_check(const AlgebraElement& x, u64 m)
{
    const auto& qp = x.quotient_ptr();
    const Modulus& mod = x.modulus();
    const bool charp = mod.precision() == 1;
    const long floor = precision_floor(*qp, mod);
    AlgebraElement one = AlgebraElement::one(qp, mod);
    FiltValue wx = lazard_value(x - one);
    const u64 pm = checked_pow(qp->p(), static_cast<int>(m));
    FiltValue lhs = lazard_value(x.pow(pm) - one);
    FiltValue rhs;
    if (wx.kind == FiltKind::Zero) {
        rhs = FiltValue::zero();
    } else if (wx.kind == FiltKind::AtLeast) {
        rhs = FiltValue::at_least(floor);
    } else {
        if (!charp && wx.value <= 1)
            throw ValidationError("hypothesis w(x-1) > w(p) = 1 fails; the identity does not apply");
        if (charp && wx.value <= 0)
            throw ValidationError("hypothesis w(x-1) > 0 fails; the identity does not apply");
        long r = charp ? static_cast<long>(pm) * wx.value : static_cast<long>(m) + wx.value;
        rhs = r < floor ? FiltValue::exact(r) : FiltValue::at_least(floor);
    }
    return {lhs, rhs, consistent(lhs, rhs)};
}

// ---------------------------------------------------------------- ideals

Side parse_side(const std::string& s)
{
    if (s == "left")
        return Side::Left;
    if (s == "right")
        return Side::Right;
    if (s == "two-sided" || s == "two_sided" || s == "both")
        return Side::TwoSided;
    throw ValidationError("unknown ideal side '" + s + "'");
}

std::string side_name(Side s)
{
    switch (s) {
    case Side::Left:
        return "left";
    case Side::Right:
        return "right";
    case Side::TwoSided:
        break;
    }
    return "two-sided";
}

SubmoduleBasis::SubmoduleBasis(QuotientPtr q, Modulus mod, Side side)
    : q_(std::move(q)), side_(side), form_(mod, q_->order())
{
}

std::vector<AlgebraElement> SubmoduleBasis::rows() const
{
    std::vector<AlgebraElement> out;
    for (const auto& r : form_.rows())
        out.emplace_back(q_, form_.modulus(), r);
    return out;
}

bool SubmoduleBasis::is_subset_of(const SubmoduleBasis& o) const
{
    for (const auto& r : form_.rows())
        if (!o.form_.contains(r))
            return false;
    return true;
}

SubmoduleBasis ideal_closure(const std::vector<AlgebraElement>& gens, Side side, QuotientPtr q, Modulus mod)
{
    SubmoduleBasis I(q, mod, side);
    std::vector<AlgebraElement> queue;
    for (const auto& g : gens) {
        if (g.quotient_ptr() != q || !(g.modulus() == mod))
            throw ValidationError("generator lives in a different algebra");
        queue.push_back(g);
    }
    // Every vector that enlarges the module has its translates by the
    // generators queued; the module is then closed under the group.
    while (!queue.empty()) {
        AlgebraElement v = std::move(queue.back());
        queue.pop_back();
        if (!I.form().insert(v.coeffs()))
            continue;
        for (std::size_t i = 0; i < q->dim(); ++i) {
            std::size_t g = q->generator(i);
            if (side != Side::Left)
                queue.push_back(v.right_translate(g));
            if (side != Side::Right)
                queue.push_back(v.left_translate(g));
        }
    }
    I.form().canonicalize();
    return I;
}

AlgebraElement rho(std::span<const u64> f, const AlgebraElement& x)
{
    if (f.size() != x.quotient().order())
        throw ValidationError("function must be given on every element of the quotient");
    AlgebraElement r = x;
    for (std::size_t g = 0; g < f.size(); ++g)
        if (x.coeff(g) != 0)
            r.set(g, x.modulus().mul(x.coeff(g), x.modulus().reduce_u(f[g])));
    return r;
}

} // namespace iwasawa
