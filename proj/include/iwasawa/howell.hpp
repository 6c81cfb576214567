#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "iwasawa/modular.hpp"

namespace iwasawa {

using Vec = std::vector<u64>;

// Submodule of (Z/p^N)^ncols kept in Howell form: rows sorted by pivot
// column, each pivot normalised to p^e, and p^(N-e) * row always lies in the
// span of the later rows. That last property makes membership a plain
// reduction and gives a unique normal form once entries above pivots are
// reduced (canonicalize()).
class HowellForm {
public:
    HowellForm(Modulus mod, std::size_t ncols);

    const Modulus& modulus() const { return mod_; }
    std::size_t ncols() const { return ncols_; }
    std::size_t nrows() const { return rows_.size(); }
    const std::vector<Vec>& rows() const { return rows_; }
    const std::vector<std::size_t>& pivot_cols() const { return pivots_; }
    int pivot_exponent(std::size_t row) const { return exps_[row]; }

    // Adds v to the module. Returns true if the module grew.
    bool insert(Vec v);
    bool insert(std::span<const u64> v) { return insert(Vec(v.begin(), v.end())); }

    // Remainder of v after reduction; zero iff v is in the module.
    Vec reduce(Vec v) const;
    bool contains(std::span<const u64> v) const;

    // Composition length: sum over rows of (N - pivot exponent).
    long length() const;
    bool is_free() const;

    // Reduce entries above pivots into [0, p^e). Idempotent.
    void canonicalize();

    // Rows of the canonical form; equal modules give equal results.
    std::vector<Vec> canonical_rows() const;

    bool same_module(const HowellForm& other) const;

    // Rows of the intersection with the coordinate subspace {x : x_c = 0 for
    // c not in `allowed`}. allowed.size() == ncols.
    std::vector<Vec> intersect_coordinates(const std::vector<bool>& allowed) const;

private:
    std::size_t first_nonzero(const Vec& v, std::size_t from) const;
    void scale(Vec& v, u64 s, std::size_t from) const;
    void axpy(Vec& v, u64 s, const Vec& w, std::size_t from) const; // v -= s*w

    Modulus mod_;
    std::size_t ncols_;
    std::vector<Vec> rows_;
    std::vector<std::size_t> pivots_;
    std::vector<int> exps_;
    std::vector<long> row_of_col_;
};

} // namespace iwasawa
