#include "tnspec/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace tnspec {

void DensityMatrix::validate() const {
  const std::size_t d = d_a * d_b;
  if (mat.rows != d || mat.cols != d)
    throw std::invalid_argument("DensityMatrix: dim mismatch");
  double herm = 0.0;
  cx tr = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    tr += mat(i, i);
    for (std::size_t j = i; j < d; ++j)
      herm = std::max(herm, std::abs(mat(i, j) - std::conj(mat(j, i))));
  }
  if (herm > 1e-10) throw std::runtime_error("DensityMatrix: not Hermitian");
  if (std::abs(tr - cx(1.0)) > 1e-10)
    throw std::runtime_error("DensityMatrix: trace != 1");
}

DensityMatrix reduce_dense(const PureState& psi, const TriPartition& part) {
  const std::size_t d_a = part.dim_a(psi.phys_dim);
  const std::size_t d_b = part.dim_b(psi.phys_dim);
  const std::size_t d_c = part.dim_c(psi.phys_dim);
  if (d_a * d_b > kOracleCap)
    throw std::invalid_argument("reduce_dense: d_a*d_b over oracle cap");
  // partition_state orders the fused groups by first site; force (A, B, C).
  Tensor abc = partition_state(psi, part).permuted({"A", "B", "C"});
  const std::size_t dab = d_a * d_b;
  DensityMatrix rho;
  rho.d_a = d_a;
  rho.d_b = d_b;
  rho.mat = Matrix(dab, dab);
  for (std::size_t i = 0; i < dab; ++i)
    for (std::size_t j = 0; j < dab; ++j) {
      cx acc = 0.0;
      for (std::size_t c = 0; c < d_c; ++c)
        acc += abc.data()[i * d_c + c] * std::conj(abc.data()[j * d_c + c]);
      rho.mat(i, j) = acc;
    }
  return rho;
}

Matrix partial_transpose(const DensityMatrix& rho) {
  const std::size_t d_a = rho.d_a, d_b = rho.d_b, d = d_a * d_b;
  Matrix pt(d, d);
  for (std::size_t a = 0; a < d_a; ++a)
    for (std::size_t b = 0; b < d_b; ++b)
      for (std::size_t ap = 0; ap < d_a; ++ap)
        for (std::size_t bp = 0; bp < d_b; ++bp)
          pt(a * d_b + b, ap * d_b + bp) = rho.mat(a * d_b + bp, ap * d_b + b);
  return pt;
}

double exact_logneg(const DensityMatrix& rho) {
  rho.validate();
  if (rho.d_a * rho.d_b > kOracleCap)
    throw std::invalid_argument("exact_logneg: over oracle cap");
  Matrix pt = partial_transpose(rho);
  HermEig eig = eig_hermitian_dense(pt, false);
  double tn = 0.0;
  for (double v : eig.values) tn += std::abs(v);
  return std::log2(std::max(tn, 1.0));
}

double purity(const DensityMatrix& rho) {
  double s = 0.0;
  for (const cx& z : rho.mat.data) s += std::norm(z);
  return s;
}

double variance_bound(const DensityMatrix& rho) { return 2.0 * purity(rho); }

double exact_entropy(const DensityMatrix& rho) {
  HermEig eig = eig_hermitian_dense(rho.mat, false);
  double s = 0.0;
  for (double v : eig.values)
    if (v > 1e-14) s -= v * std::log2(v);
  return s;
}

}  // namespace tnspec
