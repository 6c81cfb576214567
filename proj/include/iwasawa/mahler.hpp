#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iwasawa/algebra.hpp"
#include "iwasawa/chart.hpp"

namespace iwasawa {

// Multi-indices alpha with |alpha| <= D in graded lexicographic order.
class Simplex {
public:
    Simplex(std::size_t d, u64 D);

    std::size_t dim() const { return d_; }
    u64 degree() const { return D_; }
    std::size_t size() const { return points_.size(); }
    const Vec& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<Vec>& points() const { return points_; }
    // Position of alpha, or size() when |alpha| > D.
    std::size_t find(std::span<const u64> alpha) const;
    static u64 total(std::span<const u64> alpha);

private:
    std::size_t d_;
    u64 D_;
    std::vector<Vec> points_;
    std::map<Vec, std::size_t> where_;
};

// Mahler coefficients m_alpha for |alpha| <= D. Each value is a vector over
// Z/p^N: width 1 for scalar functions, |Q| for algebra-valued ones.
struct MahlerTable {
    Simplex simplex;
    Modulus mod;
    std::size_t width = 1;
    std::vector<Vec> entries;
    // Per shell |alpha| = s: least valuation (scalars) or least Lazard value
    // (algebra values, needs `quotient`).
    std::vector<FiltValue> decay;
    QuotientPtr quotient;

    const Vec& at(std::span<const u64> alpha) const;
};

using MahlerFunction = std::function<Vec(const Vec& beta)>;

// Newton forward differences on the simplex; f is called once per point.
MahlerTable mahler_coeffs(const MahlerFunction& f, std::size_t d, u64 D, Modulus mod, std::size_t width,
                          QuotientPtr quotient = nullptr);

// The same coefficients by the alternating sum over beta <= alpha.
Vec mahler_coeff_direct(const MahlerFunction& f, std::span<const u64> alpha, Modulus mod);

// After the shell `from`, finite shell values increase strictly and a zero
// shell is followed only by zero shells.
bool decay_eventually_increasing(const std::vector<FiltValue>& decay, std::size_t from);

struct Reconstruction {
    Vec value;
    // Digits that are certain: N when every alpha <= gamma lies inside the
    // table, otherwise the least valuation of the top shell.
    int tail_bound;
};

Reconstruction reconstruct(const MahlerTable& T, std::span<const u64> gamma, int required = 0);

// Coefficient of g^beta times binom(beta, alpha) for the lift beta in
// [0, p^n)^d. `strict` insists on n >= N + v_p(alpha!), the level at which
// the scaled coefficient no longer depends on the lift.
AlgebraElement divided_power(std::span<const u64> alpha, const AlgebraElement& x, bool strict = false);

class AutomorphismSpec {
public:
    static AutomorphismSpec identity(ChartPtr chart);
    static AutomorphismSpec conjugation(const GroupElement& c);
    // phi(g_i) = images[i]; the homomorphism property is checked on a
    // quotient by check_on().
    static AutomorphismSpec from_images(ChartPtr chart, std::vector<GroupElement> images);

    const GroupChart& chart() const { return *chart_; }
    const ChartPtr& chart_ptr() const { return chart_; }
    const std::string& description() const { return description_; }
    const std::vector<GroupElement>& images() const { return images_; }
    // Conjugations (and the identity) descend to every quotient unchecked.
    bool inner() const { return conjugator_.has_value(); }

    GroupElement apply(const GroupElement& g) const;
    // phi^k
    AutomorphismSpec power(u64 k) const;
    // psi(g_i) = phi(g_i) g_i^{-1}
    GroupElement psi(std::size_t i) const;

    // Verified properties.
    bool trivial_mod_centre() const;
    bool omega_compatible() const;

    // phi on the quotient as an index map. Throws ValidationError if it is
    // not a bijective homomorphism of Q.
    std::vector<std::size_t> on_quotient(const QuotientGroup& q) const;

private:
    ChartPtr chart_;
    std::vector<GroupElement> images_;
    std::optional<GroupElement> conjugator_;
    std::string description_;
};

// m_alpha(phi) of beta -> phi(g^beta) g^{-beta} in (Z/p^N)[Q].
MahlerTable aut_mahler_coeffs(const AutomorphismSpec& phi, QuotientPtr q, Modulus mod, u64 D);

struct MahlerAutResult {
    bool by_formula = true;
    bool by_commutation = true;
    std::optional<Vec> formula_witness;                            // first alpha that differs
    std::optional<std::pair<std::size_t, std::size_t>> commutation_witness; // (i, j)
};

MahlerAutResult is_mahler_aut(const AutomorphismSpec& phi, QuotientPtr q, Modulus mod, u64 D);

struct Expansion {
    AlgebraElement approx;
    FiltValue residual;
};

// sum_{|alpha| <= D} m_alpha(phi) * divided_power(alpha, x) against phi(x).
Expansion expand_aut(const AutomorphismSpec& phi, const AlgebraElement& x, u64 D);
// Residuals for every D in [0, Dmax], sharing one table.
std::vector<FiltValue> expansion_residuals(const AutomorphismSpec& phi, const MahlerTable& table,
                                           const std::vector<std::size_t>& phi_q, const AlgebraElement& x);
// Non-decreasing once values are clamped at the floor: past it the quotient
// cannot tell an exact zero from a value that is merely large.
bool residuals_monotone(const std::vector<FiltValue>& residuals, long floor);

struct ZApproximants {
    std::vector<GroupElement> values; // index m: (phi^{p^m}(g) g^{-1})^{p^{-m}}
    std::optional<int> stable_from;   // first m after which all values agree
};

ZApproximants z_map(const AutomorphismSpec& phi, const GroupElement& g, int m_max);

std::vector<FiltValue> q_growth(const AutomorphismSpec& phi, std::size_t i, int m_max, QuotientPtr q, Modulus mod);

enum class GrowthLaw { Affine, Geometric };

struct GrowthFit {
    GrowthLaw law = GrowthLaw::Affine;
    std::optional<long> lambda; // value at m = 0 when resolved
    bool exact = true;          // every resolved cell matches the law
    bool all_zero = false;
    std::vector<long> predicted; // law value per m (when lambda is known)
    std::vector<std::string> cells; // exact | >=floor | zero
};

// Char 0: v_m = lambda + m. Char p: v_m = p^m lambda. No least squares.
GrowthFit fit_growth(const std::vector<FiltValue>& values, GrowthLaw law, u64 p);

struct ApproxBound {
    FiltValue lhs;
    long bound;
    bool ok;
    int m1;
    long lambda;
};

// w(m_alpha(phi^{p^m}) - q_m^alpha) >= (2m - m1) + (|alpha| - 1) lambda.
ApproxBound approx_bound_check(const AutomorphismSpec& phi, QuotientPtr q, Modulus mod, int m,
                               std::span<const u64> alpha, int m_max);

} // namespace iwasawa
