#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "iwasawa/algebra.hpp"
#include "iwasawa/mahler.hpp"

namespace iwasawa {

// U = <g_1^{p^{e_1}}, ..., g_d^{p^{e_d}}>.
struct OpenSubgroupSpec {
    std::vector<int> e;

    static OpenSubgroupSpec whole(std::size_t d) { return {std::vector<int>(d, 0)}; }
    std::string to_string() const;
    friend bool operator==(const OpenSubgroupSpec&, const OpenSubgroupSpec&) = default;
};

// The image of U in Q with its right cosets U h.
class SubgroupImage {
public:
    static SubgroupImage build(QuotientPtr q, const OpenSubgroupSpec& U);

    const QuotientPtr& quotient_ptr() const { return q_; }
    const OpenSubgroupSpec& spec() const { return spec_; }
    // |image| == p^{sum (n - e_i)}
    bool compatible() const { return compatible_; }
    std::size_t order() const { return elements_.size(); }
    const std::vector<std::size_t>& elements() const { return elements_; }
    bool contains(std::size_t idx) const { return coset_[idx] == coset_[0]; }
    std::size_t coset_of(std::size_t idx) const { return coset_[idx]; }
    std::size_t coset_count() const { return ncosets_; }
    // Indicator of the right coset with the given id, as a function on Q.
    Vec indicator(std::size_t coset) const;

private:
    QuotientPtr q_;
    OpenSubgroupSpec spec_;
    bool compatible_ = false;
    std::vector<std::size_t> elements_;
    std::vector<std::size_t> coset_;
    std::size_t ncosets_ = 0;
};

struct ControlVerdict {
    bool definitional = false;
    bool by_action = false;
    bool agree() const { return definitional == by_action; }
};

// definitional: (I cap A_U) A == I. by_action: rho(1_{Uh})(I) in I for every
// right coset. I must be a right or two-sided ideal.
ControlVerdict is_controlled(const SubmoduleBasis& I, const SubgroupImage& U);
ControlVerdict is_controlled(const SubmoduleBasis& I, const OpenSubgroupSpec& U);

struct ControlCell {
    OpenSubgroupSpec spec;
    bool compatible = false;
    ControlVerdict verdict;
};

struct ControllerEstimate {
    OpenSubgroupSpec estimate;   // coordinatewise max over controlling cells
    std::vector<ControlCell> cells; // in lexicographic order of e
    bool agree = true;           // definitional == by_action everywhere
};

// Sweeps e in {0..max_exponent}^d (max_exponent < 0 means the level).
// Cells whose image has the wrong order are recorded but not used.
ControllerEstimate controller_estimate(const SubmoduleBasis& I, int max_exponent = -1, unsigned threads = 1);

struct CosetComponent {
    Vec b;                    // representative g_1^{b_1} ... g_d^{b_d}
    std::size_t rep = 0;      // its index in Q
    AlgebraElement component; // r_b, supported on U
};

// r = sum_b r_b g_b with 0 <= b_i < p^{e_i}.
std::vector<CosetComponent> coset_split(const AlgebraElement& r, const SubgroupImage& U);

// f = 1 - indicator(U) as a function on Q.
Vec outside_indicator(const SubgroupImage& U);

enum class Tri { False, True, Indeterminate };
std::string tri_name(Tri t);

// v(q_{i,m}) for q_{i,m} = z(g_i)^{p^m} - 1 with z = z(phi^{p^{m1}}).
struct ApproxSeries {
    AutomorphismSpec phi; // already raised to p^{m1}
    QuotientPtr q;
    Modulus mod;
    int m1 = 0;
    std::vector<GroupElement> z;                // z(g_i)
    std::vector<std::vector<FiltValue>> values; // [i][m]
    std::optional<long> lambda;
    std::optional<std::size_t> realizing;
    // beta_i = lim q_{r,m}^{-1} q_{i,m}, read off the log of z when z(g_i)
    // is a p-adic power of z(g_r); mod p^N.
    std::vector<std::optional<u64>> betas;
};

ApproxSeries approx_series(const AutomorphismSpec& phi, QuotientPtr q, Modulus mod, int m_max, int m1 = 0);

// v(z(g) - 1) > lambda, three-valued near the floor.
Tri u_lambda(const ApproxSeries& s, const GroupElement& g);

struct ULambdaReport {
    std::vector<Tri> membership; // per element of Q
    std::size_t members = 0;
    std::size_t indeterminate = 0;
    bool closed = false;
    bool contains_pth_powers = false;
    bool proper = false;
};

ULambdaReport u_lambda_set(const ApproxSeries& s);

// sum_i beta_i d_i(x), where d_i scales g^beta by beta_i.
AlgebraElement h_derivation(std::span<const u64> betas, const AlgebraElement& x, bool strict = false);

// h(r) in I for every basis row r of I.
bool annihilation_check(std::span<const u64> betas, const SubmoduleBasis& I);

// Stage-level shadows of the profinite predicates.
struct FaithfulnessReport {
    bool faithful = true;
    std::optional<std::size_t> witness; // g != 1 with g - 1 in I
};
FaithfulnessReport stage_faithful(const SubmoduleBasis& I);

struct JIdealReport {
    std::vector<std::size_t> centre; // image of Z(G) in Q
    long image_length = 0;           // length of (A_Z + I) / I
    long bound = 0;                  // N * rank bound
    bool holds = false;
};
JIdealReport stage_j_ideal(const SubmoduleBasis& I, long rank_bound);

} // namespace iwasawa
