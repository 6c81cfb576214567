#include "iwasawa/howell.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace iwasawa {

HowellForm::HowellForm(Modulus mod, std::size_t ncols)
    : mod_(mod), ncols_(ncols), row_of_col_(ncols, -1)
{
}

std::size_t HowellForm::first_nonzero(const Vec& v, std::size_t from) const
{
    for (std::size_t c = from; c < ncols_; ++c)
        if (v[c] != 0)
            return c;
    return ncols_;
}

void HowellForm::scale(Vec& v, u64 s, std::size_t from) const
{
    for (std::size_t c = from; c < ncols_; ++c)
        if (v[c])
            v[c] = mod_.mul(v[c], s);
}

void HowellForm::axpy(Vec& v, u64 s, const Vec& w, std::size_t from) const
{
    if (s == 0)
        return;
    for (std::size_t c = from; c < ncols_; ++c)
        if (w[c])
            v[c] = mod_.sub(v[c], mod_.mul(s, w[c]));
}

Vec HowellForm::reduce(Vec v) const
{
    std::size_t c = first_nonzero(v, 0);
    while (c < ncols_) {
        long r = row_of_col_[c];
        if (r < 0)
            return v;
        const int e = exps_[static_cast<std::size_t>(r)];
        if (mod_.val(v[c]) < e)
            return v;
        u64 q = v[c] / mod_.p_power(e);
        axpy(v, q, rows_[static_cast<std::size_t>(r)], c);
        c = first_nonzero(v, c + 1);
    }
    return v;
}

bool HowellForm::contains(std::span<const u64> v) const
{
    Vec r = reduce(Vec(v.begin(), v.end()));
    return std::all_of(r.begin(), r.end(), [](u64 x) { return x == 0; });
}

bool HowellForm::insert(Vec v0)
{
    if (v0.size() != ncols_)
        throw ValidationError("HowellForm::insert: dimension mismatch");
    bool grew = false;
    std::deque<Vec> queue;
    queue.push_back(std::move(v0));
    while (!queue.empty()) {
        Vec w = std::move(queue.front());
        queue.pop_front();
        std::size_t c = first_nonzero(w, 0);
        while (c < ncols_) {
            long r = row_of_col_[c];
            const int vw = mod_.val(w[c]);
            if (r >= 0 && vw >= exps_[static_cast<std::size_t>(r)]) {
                auto ri = static_cast<std::size_t>(r);
                u64 q = w[c] / mod_.p_power(exps_[ri]);
                axpy(w, q, rows_[ri], c);
                c = first_nonzero(w, c + 1);
                continue;
            }
            // w becomes the pivot row at column c.
            u64 unit = w[c] / mod_.p_power(vw);
            scale(w, mod_.inv(unit), c);
            grew = true;
            Vec sat = w;
            scale(sat, mod_.p_power(mod_.precision() - vw), c);
            if (r >= 0) {
                auto ri = static_cast<std::size_t>(r);
                queue.push_back(std::move(rows_[ri]));
                rows_[ri] = std::move(w);
                exps_[ri] = vw;
            } else {
                auto pos = static_cast<std::size_t>(
                    std::lower_bound(pivots_.begin(), pivots_.end(), c) - pivots_.begin());
                rows_.insert(rows_.begin() + static_cast<long>(pos), std::move(w));
                pivots_.insert(pivots_.begin() + static_cast<long>(pos), c);
                exps_.insert(exps_.begin() + static_cast<long>(pos), vw);
                for (std::size_t i = pos; i < pivots_.size(); ++i)
                    row_of_col_[pivots_[i]] = static_cast<long>(i);
            }
            if (first_nonzero(sat, c) < ncols_)
                queue.push_back(std::move(sat));
            break;
        }
    }
    return grew;
}

long HowellForm::length() const
{
    long s = 0;
    for (int e : exps_)
        s += mod_.precision() - e;
    return s;
}

bool HowellForm::is_free() const
{
    return std::all_of(exps_.begin(), exps_.end(), [](int e) { return e == 0; });
}

void HowellForm::canonicalize()
{
    for (std::size_t j = 0; j < rows_.size(); ++j) {
        const std::size_t c = pivots_[j];
        const u64 pe = mod_.p_power(exps_[j]);
        for (std::size_t i = 0; i < j; ++i) {
            u64 q = rows_[i][c] / pe;
            axpy(rows_[i], q, rows_[j], c);
        }
    }
}

std::vector<Vec> HowellForm::canonical_rows() const
{
    HowellForm copy = *this;
    copy.canonicalize();
    return copy.rows_;
}

bool HowellForm::same_module(const HowellForm& other) const
{
    return mod_ == other.mod_ && ncols_ == other.ncols_ && canonical_rows() == other.canonical_rows();
}

std::vector<Vec> HowellForm::intersect_coordinates(const std::vector<bool>& allowed) const
{
    // Put disallowed columns first; rows of the permuted Howell form whose
    // pivot falls in the allowed block span the intersection.
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < ncols_; ++c)
        if (!allowed[c])
            order.push_back(c);
    const std::size_t split = order.size();
    for (std::size_t c = 0; c < ncols_; ++c)
        if (allowed[c])
            order.push_back(c);

    HowellForm permuted(mod_, ncols_);
    for (const Vec& row : rows_) {
        Vec w(ncols_);
        for (std::size_t k = 0; k < ncols_; ++k)
            w[k] = row[order[k]];
        permuted.insert(std::move(w));
    }
    std::vector<Vec> out;
    for (std::size_t i = 0; i < permuted.rows_.size(); ++i) {
        if (permuted.pivots_[i] < split)
            continue;
        Vec back(ncols_, 0);
        for (std::size_t k = 0; k < ncols_; ++k)
            back[order[k]] = permuted.rows_[i][k];
        out.push_back(std::move(back));
    }
    return out;
}

} // namespace iwasawa
