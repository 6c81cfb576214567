#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "iwasawa/modular.hpp"
#include "iwasawa/nilpotent.hpp"

namespace iwasawa {

using IntMatrix = std::vector<std::vector<i64>>;
// Row-major u x u matrix of residues modulo p^M (the chart's working ring).
using Matrix = std::vector<u64>;

// A uniform pro-p group given by nilpotent integer matrices x_1..x_d; the
// ordered basis is g_i = exp(x_i). Arithmetic happens modulo p^M with M as
// large as 64-bit residues allow; divisions by k! and by the denominators of
// the log-coordinate map eat guard digits, and what is left is
// reliable_prec().
class GroupChart {
public:
    static std::shared_ptr<const GroupChart> create(u64 p, std::vector<IntMatrix> basis, std::string name = "matrices");

    // x = p E_12 in 2x2.
    static std::shared_ptr<const GroupChart> zp(u64 p);
    // x_i = p E_{1,i+1} in (d+1)x(d+1).
    static std::shared_ptr<const GroupChart> abelian(u64 p, std::size_t d);
    // x1 = p E12, x2 = p E23, x3 = p^2 E13, so that (g1, g2) = g3.
    static std::shared_ptr<const GroupChart> heisenberg(u64 p);
    // x = p E_ab for a < b in lexicographic order.
    static std::shared_ptr<const GroupChart> unitriangular(u64 p, std::size_t n);
    // x = p^(b-a) E_ab ordered by superdiagonal, then row. Commutators of
    // generators are generators, so level-one quotients keep the class.
    static std::shared_ptr<const GroupChart> graded_unitriangular(u64 p, std::size_t n);

    u64 p() const { return p_; }
    std::size_t dim() const { return basis_.size(); }
    std::size_t size() const { return u_; }
    const std::string& name() const { return name_; }
    const IntMatrix& basis_matrix(std::size_t i) const { return basis_[i]; }
    // omega(g_i): least p-adic valuation among the entries of x_i.
    const std::vector<int>& omega() const { return omega_; }
    int omega_min() const { return omega_min_; }
    const Modulus& working() const { return mod_; }
    int reliable_prec() const { return reliable_; }

    // Structure constants in the basis x_i (always integral here).
    LiePresentation lie_presentation(int prec) const;
    bool powerful() const { return powerful_; }

    Matrix identity() const;
    Matrix mul(const Matrix& a, const Matrix& b) const;
    Matrix inverse(const Matrix& g) const;
    Matrix pow(const Matrix& g, u64 e) const;
    Matrix lie_matrix(std::span<const u64> lambda) const;
    // lambda with sum lambda_i x_i = X; throws if X is outside the span.
    Vec lie_coords(const Matrix& X) const;
    Matrix exp_nilpotent(const Matrix& X) const;
    Matrix log_unipotent(const Matrix& g) const;
    // g_i^e = exp(e x_i).
    Matrix generator_power(std::size_t i, u64 e) const;
    // g_1^{b_1} ... g_d^{b_d}.
    Matrix element(std::span<const u64> beta) const;
    // Coordinates of the second kind modulo p^reliable_prec().
    Vec coordinates(const Matrix& g) const;
    bool equal_at(const Matrix& a, const Matrix& b, int prec) const;

private:
    GroupChart() = default;

    u64 p_ = 0;
    std::size_t u_ = 0;
    std::string name_;
    std::vector<IntMatrix> basis_;
    std::vector<Matrix> basis_res_;
    std::vector<int> omega_;
    int omega_min_ = 0;
    Modulus mod_{3, 1};
    int reliable_ = 0;
    bool powerful_ = true;
    // lambda = W' X_S / p^s
    std::vector<std::size_t> sel_;
    std::vector<Vec> wprime_;
    int s_ = 0;
    std::vector<i64> structure_;
};

using ChartPtr = std::shared_ptr<const GroupChart>;

class GroupElement {
public:
    GroupElement(ChartPtr chart, Matrix m);

    static GroupElement identity(ChartPtr chart);
    static GroupElement generator(ChartPtr chart, std::size_t i);
    static GroupElement from_coordinates(ChartPtr chart, std::span<const u64> beta);
    static GroupElement exp(ChartPtr chart, std::span<const u64> lambda);

    const GroupChart& chart() const { return *chart_; }
    const ChartPtr& chart_ptr() const { return chart_; }
    const Matrix& matrix() const { return m_; }

    Vec coordinates() const { return chart_->coordinates(m_); }
    // Coordinates reduced modulo p^n.
    Vec coordinates(int n) const;
    Vec log() const { return chart_->lie_coords(chart_->log_unipotent(m_)); }
    // Least valuation of the entries of log g; kInfiniteValuation at 1.
    int omega() const;
    bool is_identity() const;

    GroupElement operator*(const GroupElement& o) const;
    GroupElement inverse() const;
    GroupElement pow(u64 e) const;
    bool operator==(const GroupElement& o) const;

private:
    ChartPtr chart_;
    Matrix m_;
};

// a b a^-1 b^-1
GroupElement commutator(const GroupElement& a, const GroupElement& b);

} // namespace iwasawa
