#include "rational.hpp"

#include <algorithm>

namespace iwasawa::detail {

namespace {

int mpz_val(mpz_class z, u64 p)
{
    int v = 0;
    mpz_class pp(static_cast<unsigned long>(p));
    while (z % pp == 0) {
        z /= pp;
        ++v;
    }
    return v;
}

} // namespace

int rat_val(const Rat& x, u64 p)
{
    if (x == 0)
        return kInfiniteValuation;
    return mpz_val(x.get_num(), p) - mpz_val(x.get_den(), p);
}

std::vector<std::size_t> rref(RatMatrix& m, std::size_t ncols)
{
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < m.size(); ++c) {
        std::size_t k = r;
        while (k < m.size() && m[k][c] == 0)
            ++k;
        if (k == m.size())
            continue;
        std::swap(m[r], m[k]);
        Rat inv = 1 / m[r][c];
        for (auto& x : m[r])
            x *= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c] == 0)
                continue;
            Rat f = m[i][c];
            for (std::size_t j = 0; j < ncols; ++j)
                m[i][j] -= f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    m.resize(r);
    return pivots;
}

RatMatrix left_null_space(const RatMatrix& a, std::size_t d, std::size_t m)
{
    // x A = 0  <=>  A^T x^T = 0.
    RatMatrix t(m, RatRow(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < m; ++j)
            t[j][i] = a[i][j];
    auto piv = rref(t, d);
    std::vector<bool> is_pivot(d, false);
    for (auto c : piv)
        is_pivot[c] = true;
    RatMatrix basis;
    for (std::size_t f = 0; f < d; ++f) {
        if (is_pivot[f])
            continue;
        RatRow v(d);
        v[f] = 1;
        for (std::size_t r = 0; r < piv.size(); ++r)
            v[piv[r]] = -t[r][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

RatMatrix saturate(RatMatrix rows, std::size_t ncols, u64 p)
{
    // Drop dependent rows first so full pivoting terminates cleanly.
    rref(rows, ncols);
    const std::size_t k = rows.size();
    std::vector<bool> row_done(k, false), col_done(ncols, false);
    std::vector<std::size_t> pivot_of_row(k);
    for (std::size_t step = 0; step < k; ++step) {
        int best = kInfiniteValuation;
        std::size_t br = 0, bc = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if (row_done[i])
                continue;
            for (std::size_t j = 0; j < ncols; ++j) {
                if (col_done[j] || rows[i][j] == 0)
                    continue;
                int v = rat_val(rows[i][j], p);
                if (v < best) {
                    best = v;
                    br = i;
                    bc = j;
                }
            }
        }
        Rat inv = 1 / rows[br][bc];
        for (auto& x : rows[br])
            x *= inv;
        for (std::size_t i = 0; i < k; ++i) {
            if (i == br || rows[i][bc] == 0)
                continue;
            Rat f = rows[i][bc];
            for (std::size_t j = 0; j < ncols; ++j)
                rows[i][j] -= f * rows[br][j];
        }
        row_done[br] = true;
        col_done[bc] = true;
        pivot_of_row[br] = bc;
    }
    // Order rows by pivot column for a stable presentation.
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pivot_of_row[a] < pivot_of_row[b]; });
    RatMatrix out;
    for (auto i : order)
        out.push_back(rows[i]);
    return out;
}

u64 rat_residue(const Rat& x, const Modulus& mod)
{
    mpz_class m(std::to_string(mod.value()));
    mpz_class num = x.get_num() % m;
    if (num < 0)
        num += m;
    mpz_class den = x.get_den() % m;
    u64 n = std::stoull(num.get_str());
    u64 d = std::stoull(den.get_str());
    return mod.mul(n, mod.inv(d));
}

} // namespace iwasawa::detail
