#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "iwasawa/howell.hpp"
#include "iwasawa/modular.hpp"
#include "iwasawa/padic.hpp"

namespace iwasawa {

namespace detail {
struct RationalBasis;
}

// [x_i, x_j] contains coeff * x_k. Indices are 0-based.
struct BracketTerm {
    std::size_t i;
    std::size_t j;
    std::size_t k;
    i64 coeff;
};

// A Z_p-Lie algebra on the basis x_1..x_d with integer structure constants.
// Listing [x_i,x_j] also sets [x_j,x_i] to the negative unless that pair is
// listed explicitly, in which case validate() checks the two agree.
class LiePresentation {
public:
    LiePresentation(u64 p, std::size_t dim, int prec, const std::vector<BracketTerm>& terms);

    // p*E_ab for a < b in lexicographic order, inside n x n matrices.
    static LiePresentation strictly_upper_triangular(u64 p, std::size_t n, int prec);
    static LiePresentation abelian(u64 p, std::size_t dim, int prec);

    u64 p() const { return p_; }
    std::size_t dim() const { return dim_; }
    int prec() const { return prec_; }
    Modulus modulus() const { return Modulus(p_, prec_); }

    i64 c(std::size_t i, std::size_t j, std::size_t k) const { return c_[(i * dim_ + j) * dim_ + k]; }
    PadicScalar structure_constant(std::size_t i, std::size_t j, std::size_t k) const
    {
        return PadicScalar(p_, prec_, c(i, j, k));
    }
    bool explicitly_listed(std::size_t i, std::size_t j) const { return listed_[i * dim_ + j]; }

    // Bracket of integer coordinate vectors.
    std::vector<i64> bracket(std::span<const i64> x, std::span<const i64> y) const;

private:
    u64 p_;
    std::size_t dim_;
    int prec_;
    std::vector<i64> c_;
    std::vector<bool> listed_;
};

struct LieViolation {
    std::string kind; // antisymmetry | jacobi | nilpotent
    std::vector<std::size_t> indices;
    std::string detail;
};

struct LieReport {
    bool antisymmetric = true;
    bool jacobi = true;
    bool nilpotent = true;
    // Every bracket lies in p times the lattice. Reported separately: charts
    // such as the Heisenberg one with x3 = p^2 E13 are p-valuable without it.
    bool powerful = true;
    std::vector<LieViolation> violations;

    bool valid() const { return antisymmetric && jacobi && nilpotent; }
    std::string to_string() const;
};

LieReport validate(const LiePresentation& L);

// A Z_p-submodule of Z_p^d, stored as a Howell basis modulo p^N. Submodules
// produced by the Lie routines also keep an exact Q-basis so that further
// kernels are computed without precision loss.
class Submodule {
public:
    Submodule(Modulus mod, std::size_t dim);

    static Submodule zero(Modulus mod, std::size_t dim) { return Submodule(mod, dim); }
    static Submodule full(Modulus mod, std::size_t dim);
    static Submodule coordinate_span(Modulus mod, std::size_t dim, const std::vector<std::size_t>& idx);
    static Submodule from_rows(Modulus mod, std::size_t dim, const std::vector<Vec>& rows);

    std::size_t ambient_dim() const { return dim_; }
    const Modulus& modulus() const { return form_.modulus(); }
    std::vector<Vec> basis() const { return form_.canonical_rows(); }
    std::size_t rank() const { return form_.nrows(); }
    bool saturated() const { return saturated_; }
    bool is_free() const { return form_.is_free(); }
    bool contains(std::span<const u64> v) const { return form_.contains(v); }
    bool is_subset_of(const Submodule& other) const;
    bool operator==(const Submodule& o) const { return dim_ == o.dim_ && form_.same_module(o.form_); }

    // True when the module is spanned by basis axes; their indices go to idx.
    bool is_coordinate_span(std::vector<std::size_t>* idx = nullptr) const;

    std::string to_string(const std::string& var = "x") const;

    const std::shared_ptr<const detail::RationalBasis>& rational() const { return rational_; }
    static Submodule from_rational(Modulus mod, std::size_t dim, std::shared_ptr<const detail::RationalBasis> rb);

private:
    std::size_t dim_;
    HowellForm form_;
    bool saturated_ = false;
    std::shared_ptr<const detail::RationalBasis> rational_;
};

// 0 = Z_0 < Z_1 < ... < Z_c = L, each the saturated kernel of
// x -> ([x, L] mod Z_{i-1}). Throws ValidationError if the chain stalls.
std::vector<Submodule> upper_central_series(const LiePresentation& L);

// Saturated kernel of x -> [x, S]. S must carry an exact basis (it does when
// produced by this module or by coordinate_span/full/zero).
Submodule centralizer(const LiePresentation& L, const Submodule& S);

// Presentation of the sublattice spanned by p^{e_i} x_i. Throws if that
// lattice is not closed under the bracket.
LiePresentation sublattice_presentation(const LiePresentation& L, const std::vector<int>& e);

// C_U(Z_2(U)) versus C_G(Z_2(G)) ∩ U, both as saturated submodules of U
// written in the basis p^{e_i} x_i.
bool centraliser_compat(const LiePresentation& L, const std::vector<int>& e);

} // namespace iwasawa
