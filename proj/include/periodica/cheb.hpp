#pragma once

// Finite Chebyshev sequences in halved storage: psi(a) = psi_0 + 2 sum psi_k T_k(a),
// so that ||psi|| = |psi_0| + 2 sum |psi_k| and the product is the folded
// two-sided convolution (psi*phi)_k = sum_j psi_|k-j| phi_|j|.

#include <cstddef>
#include <span>
#include <vector>

#include "periodica/interval.hpp"

namespace periodica {

class ChebSeq {
  public:
    ChebSeq() : coeffs_(1) {}
    explicit ChebSeq(std::vector<Interval> coeffs);

    static ChebSeq constant(const Interval& c) { return ChebSeq({c}); }
    /// The affine function c0 + c1 a.
    static ChebSeq affine(const Interval& c0, const Interval& c1) { return ChebSeq({c0, c1 / 2.0}); }
    static ChebSeq from_doubles(std::span<const double> halved);

    std::size_t degree() const noexcept { return coeffs_.size() - 1; }
    std::span<const Interval> coeffs() const noexcept { return coeffs_; }
    const Interval& operator[](std::size_t k) const { return coeffs_.at(k); }
    /// Coefficient k, zero beyond the degree.
    Interval coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : Interval(); }

    Interval norm() const;

    ChebSeq& operator+=(const ChebSeq& o);
    ChebSeq& operator-=(const ChebSeq& o);

  private:
    std::vector<Interval> coeffs_;
};

ChebSeq operator+(const ChebSeq& a, const ChebSeq& b);
ChebSeq operator-(const ChebSeq& a, const ChebSeq& b);
ChebSeq operator-(const ChebSeq& a);
ChebSeq operator*(const Interval& s, const ChebSeq& a);
ChebSeq operator+(const ChebSeq& a, const Interval& s);
ChebSeq cheb_mul(const ChebSeq& a, const ChebSeq& b);
inline ChebSeq operator*(const ChebSeq& a, const ChebSeq& b) { return cheb_mul(a, b); }

/// psi^n by repeated squaring.
ChebSeq cheb_pow(const ChebSeq& a, unsigned n);

/// Enclosures of the nodes a_k = -cos(k pi / K), k = 0..K; K = 0 gives {-1}.
std::vector<Interval> cheb_nodes(std::size_t K);
std::vector<double> cheb_nodes_native(std::size_t K);

/// Interpolant of degree K through K+1 samples at cheb_nodes(K).
ChebSeq cheb_interpolate(std::span<const Interval> samples);
ChebSeq cheb_interpolate(std::span<const double> samples);

/// Clenshaw evaluation intersected with [-||psi||, ||psi||]; throws
/// DomainError when a is not inside [-1, 1].
Interval cheb_eval(const ChebSeq& psi, const Interval& a);

/// Mid-point coefficients (a numerical function with exact binary coefficients).
ChebSeq cheb_midpoint(const ChebSeq& psi);

/// Matrix of Chebyshev sequences acting as multiplication operators.
class ChebOpMatrix {
  public:
    ChebOpMatrix() = default;
    ChebOpMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static ChebOpMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    ChebSeq& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const ChebSeq& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<ChebSeq> data_;
};

using ChebVector = std::vector<ChebSeq>;

ChebOpMatrix operator*(const ChebOpMatrix& a, const ChebOpMatrix& b);
ChebVector operator*(const ChebOpMatrix& a, const ChebVector& x);
ChebOpMatrix operator-(const ChebOpMatrix& a, const ChebOpMatrix& b);

/// max_j sum_i ||w_ij||.
Interval opmatrix_norm(const ChebOpMatrix& W);
/// sum_i ||w_i||.
Interval seq_vec_norm(std::span<const ChebSeq> w);

/// Pointwise values W(a) and w(a).
IntervalMatrix cheb_eval(const ChebOpMatrix& W, const Interval& a);
IntervalVector cheb_eval(std::span<const ChebSeq> w, const Interval& a);

}  // namespace periodica
