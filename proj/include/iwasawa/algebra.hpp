#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "iwasawa/chart.hpp"
#include "iwasawa/howell.hpp"
#include "iwasawa/modular.hpp"

namespace iwasawa {

struct QuotientOptions {
    std::size_t size_budget = 600000;
    // Full multiplication table up to this order; right-multiplication tables
    // by generator powers up to generator_table_budget; matrices beyond.
    std::size_t table_budget = 2048;
    std::size_t generator_table_budget = 70000;
    std::uint64_t seed = 1;
};

// Q = G / G^{p^n}. Elements are indexed in mixed radix by their coordinates
// beta in [0, p^n)^d with beta_1 the fastest digit.
class QuotientGroup {
public:
    static std::shared_ptr<const QuotientGroup> build(ChartPtr chart, int n, QuotientOptions opts = {});

    const GroupChart& chart() const { return *chart_; }
    const ChartPtr& chart_ptr() const { return chart_; }
    u64 p() const { return chart_->p(); }
    int level() const { return n_; }
    u64 side() const { return side_; }
    std::size_t dim() const { return chart_->dim(); }
    std::size_t order() const { return order_; }
    bool has_table() const { return !table_.empty(); }
    // Associativity was checked on every triple (true) or on a sample.
    bool fully_verified() const { return fully_verified_; }

    std::size_t index(std::span<const u64> beta) const;
    Vec coords(std::size_t idx) const;
    u64 coord(std::size_t idx, std::size_t i) const;
    std::size_t generator(std::size_t i) const { return strides_[i]; }

    std::size_t mul(std::size_t a, std::size_t b) const;
    std::size_t inv(std::size_t a) const;
    std::size_t pow(std::size_t a, u64 e) const;
    // a * g_i^e, using tables when present.
    std::size_t mul_generator_power(std::size_t a, std::size_t i, u64 e) const;

    std::size_t index_of(const GroupElement& g) const;
    GroupElement element(std::size_t idx) const;

private:
    QuotientGroup() = default;
    std::size_t mul_by_matrices(std::size_t a, std::size_t b) const;
    void verify(std::uint64_t seed);

    ChartPtr chart_;
    int n_ = 0;
    u64 side_ = 0;
    std::size_t order_ = 0;
    std::vector<std::size_t> strides_;
    // right_[(i * n + j) * order + x] = x * g_i^{p^j}
    std::vector<std::uint32_t> right_;
    std::vector<std::uint32_t> table_;
    bool fully_verified_ = false;
};

using QuotientPtr = std::shared_ptr<const QuotientGroup>;

// An element of (Z/p^N)[Q] as a dense coefficient vector.
class AlgebraElement {
public:
    AlgebraElement(QuotientPtr q, Modulus mod);
    AlgebraElement(QuotientPtr q, Modulus mod, Vec coeffs);

    static AlgebraElement zero(QuotientPtr q, Modulus mod) { return AlgebraElement(std::move(q), mod); }
    static AlgebraElement one(QuotientPtr q, Modulus mod) { return group(std::move(q), mod, 0); }
    static AlgebraElement scalar(QuotientPtr q, Modulus mod, i64 c);
    static AlgebraElement group(QuotientPtr q, Modulus mod, std::size_t idx);
    // b_i = g_i - 1
    static AlgebraElement b(QuotientPtr q, Modulus mod, std::size_t i);

    const QuotientGroup& quotient() const { return *q_; }
    const QuotientPtr& quotient_ptr() const { return q_; }
    const Modulus& modulus() const { return mod_; }
    const Vec& coeffs() const { return c_; }
    u64 coeff(std::size_t idx) const { return c_[idx]; }
    void set(std::size_t idx, u64 v) { c_[idx] = mod_.reduce_u(v); }
    bool is_zero() const;
    std::vector<std::size_t> support() const;

    AlgebraElement operator+(const AlgebraElement& o) const;
    AlgebraElement operator-(const AlgebraElement& o) const;
    AlgebraElement operator-() const;
    AlgebraElement operator*(const AlgebraElement& o) const;
    AlgebraElement scaled(u64 s) const;
    // x * g and g * x for a group element index.
    AlgebraElement right_translate(std::size_t g) const;
    AlgebraElement left_translate(std::size_t g) const;
    AlgebraElement pow(u64 e) const;
    bool operator==(const AlgebraElement& o) const;

    std::string to_string() const;

private:
    void check_compatible(const AlgebraElement& o) const;

    QuotientPtr q_;
    Modulus mod_;
    Vec c_;
};

// prod_i (g_i - 1)^{alpha_i} in the ordered sense.
AlgebraElement b_monomial(QuotientPtr q, Modulus mod, std::span<const u64> alpha, u64 degree_budget = 64);

// Coefficients lambda_alpha of x = sum lambda_alpha b^alpha for the lifts
// beta in [0, p^n)^d; indexed like Q (alpha_i < p^n).
Vec b_expansion(const AlgebraElement& x);

enum class FiltKind { Exact, AtLeast, Zero };

// A filtration value at a finite stage. AtLeast carries the floor below
// which the stage can resolve values.
struct FiltValue {
    FiltKind kind = FiltKind::Zero;
    long value = 0;

    static FiltValue exact(long v) { return {FiltKind::Exact, v}; }
    static FiltValue at_least(long f) { return {FiltKind::AtLeast, f}; }
    static FiltValue zero() { return {FiltKind::Zero, 0}; }

    bool is_exact() const { return kind == FiltKind::Exact; }
    // Lower bound valid for either kind (Zero is +infinity).
    long lower_bound() const;
    std::string to_string() const;
    std::string status() const; // exact | >=floor | zero
    friend bool operator==(const FiltValue& a, const FiltValue& b) { return a.kind == b.kind && a.value == b.value; }
};

// Exact values must match; two unresolved values are consistent; an exact
// value is inconsistent with a floor above it.
bool consistent(const FiltValue& a, const FiltValue& b);
// a >= b wherever the stage can tell; unresolved comparisons pass.
bool consistent_ge(const FiltValue& a, long b);

enum class Regime { Char0, CharP };

// Char0 (N > 1): w = min v_p(lambda_alpha) + sum alpha_i omega_i with floor
// min(N, n + omega_min). CharP (N = 1): w = min sum alpha_i omega_i over
// nonzero lambda_alpha with floor p^n omega_min.
long precision_floor(const QuotientGroup& q, const Modulus& mod);
FiltValue lazard_value(const AlgebraElement& x, long degree_cap = -1);

struct LemmaValueResult {
    FiltValue lhs;
    FiltValue rhs;
    bool ok;
};

// w(x^{p^m} - 1) against m + w(x - 1) (char 0) or p^m w(x - 1) (char p).
LemmaValueResult lemma_value_check(const AlgebraElement& x, u64 m);

enum class Side { Left, Right, TwoSided };
Side parse_side(const std::string& s);
std::string side_name(Side s);

// A Z/p^N-submodule of the group algebra closed under the declared action.
class SubmoduleBasis {
public:
    SubmoduleBasis(QuotientPtr q, Modulus mod, Side side);

    const QuotientPtr& quotient_ptr() const { return q_; }
    const Modulus& modulus() const { return form_.modulus(); }
    Side side() const { return side_; }
    const HowellForm& form() const { return form_; }
    HowellForm& form() { return form_; }
    long length() const { return form_.length(); }
    bool contains(const AlgebraElement& x) const { return form_.contains(x.coeffs()); }
    std::vector<AlgebraElement> rows() const;
    bool operator==(const SubmoduleBasis& o) const { return form_.same_module(o.form_); }
    bool is_subset_of(const SubmoduleBasis& o) const;

private:
    QuotientPtr q_;
    Side side_;
    HowellForm form_;
};

SubmoduleBasis ideal_closure(const std::vector<AlgebraElement>& gens, Side side, QuotientPtr q, Modulus mod);

// Coefficient of g multiplied by f(g).
AlgebraElement rho(std::span<const u64> f, const AlgebraElement& x);

} // namespace iwasawa
