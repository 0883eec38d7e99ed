#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tnspec/config.hpp"

namespace tnspec {

// Dense row-major complex matrix (the fused-tensor view).
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<cx> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  cx& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  cx operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  static Matrix identity(std::size_t n);
  Matrix adjoint() const;
  double frob_norm() const;
};

Matrix matmul(const Matrix& a, const Matrix& b);

// Abstract matvec-capable operator; implemented by dense matrices and by
// lazily contracted tensor networks.
class LinOp {
 public:
  virtual ~LinOp() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual void apply(const cx* in, cx* out) const = 0;          // out = A in
  virtual void apply_adjoint(const cx* in, cx* out) const = 0;  // out = A^H in
};

class DenseOp final : public LinOp {
 public:
  explicit DenseOp(Matrix m) : m_(std::move(m)) {}
  std::size_t rows() const override { return m_.rows; }
  std::size_t cols() const override { return m_.cols; }
  void apply(const cx* in, cx* out) const override;
  void apply_adjoint(const cx* in, cx* out) const override;
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

struct SvdResult {
  Matrix u;                // rows x r
  std::vector<double> s;   // descending, length r
  Matrix vh;               // r x cols
  bool rank_cap_hit = false;  // truncated_svd: cap reached above the cutoff
};

// Full (thin) SVD via one-sided Jacobi rotations.
SvdResult svd(const Matrix& m);

// Randomized truncated SVD of a matvec-capable operator: range finding with
// oversampling 10 and two power iterations, then a small dense SVD.
SvdResult truncated_svd(const LinOp& op, double cutoff, std::size_t rank_cap,
                        std::uint64_t seed = 0x5eeded);

enum class CholPath { plain, jitter, eigen_fallback };

struct CholResult {
  Matrix factor;  // n x r with factor * factor^H == m
  CholPath path = CholPath::plain;
};

// Cholesky of a Hermitian positive semidefinite matrix.  Pivot failures are
// retried with escalating diagonal jitter, then fall back to an
// eigendecomposition square root with negative eigenvalues clamped at zero.
CholResult cholesky_psd(const Matrix& m, double jitter = 1e-14);

// Rank-revealing factorization of an implicitly defined PSD matrix: greedy
// diagonally pivoted Cholesky pulling one column at a time from `column`.
// Stops when the residual diagonal drops below rel_tol * initial trace, or at
// rank_cap.  Returns F (n x r) with F F^H ~= m and the pivot order.
struct PivotedPsdResult {
  Matrix factor;
  std::vector<std::size_t> pivots;
  double residual = 0.0;  // remaining trace
};
PivotedPsdResult pivoted_psd_factor(
    std::size_t n, const std::vector<double>& diag,
    const std::function<void(std::size_t, cx*)>& column, double rel_tol,
    std::size_t rank_cap);

struct TridiagonalMatrix {
  std::vector<double> alpha;  // diagonal
  std::vector<double> beta;   // off-diagonal, size alpha.size() - 1
};

// Eigenvalues (ascending) and first eigenvector components of a symmetric
// tridiagonal matrix, via implicit-shift QL.
struct TridiagEig {
  std::vector<double> theta;  // ascending
  std::vector<double> tau;    // <e1|w_j>, sum tau^2 = 1
};
TridiagEig eig_sym_tridiagonal(const TridiagonalMatrix& t);

// Same but with the full (real) eigenvector matrix, column j <-> theta[j].
struct TridiagEigFull {
  std::vector<double> theta;
  std::vector<double> vectors;  // k x k row-major
};
TridiagEigFull eig_sym_tridiagonal_full(const TridiagonalMatrix& t);

struct HermEig {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j is the eigenvector of values[j]
};

// Dense Hermitian eigensolver: Householder tridiagonalization + implicit QL.
HermEig eig_hermitian_dense(const Matrix& m, bool want_vectors = true);

// Twice-iterated modified Gram-Schmidt orthonormalization of the columns of
// a (rows x cols) matrix, in place.  Returns the numerical rank.
std::size_t orthonormalize_columns(Matrix& m);

// Thin QR (rows >= cols not required; q is rows x k, r is k x cols with
// k = min(rows, cols)), via modified Gram-Schmidt with one reorthogonalization
// pass.  Rank-deficient columns get arbitrary orthonormal completions.
void qr(const Matrix& a, Matrix& q, Matrix& r);

// Thin LQ: a = l * q with l rows x k lower-trapezoidal, q k x cols
// row-orthonormal.
void lq(const Matrix& a, Matrix& l, Matrix& q);

}  // namespace tnspec
