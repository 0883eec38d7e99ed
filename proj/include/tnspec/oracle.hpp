#pragma once

#include "tnspec/linalg.hpp"
#include "tnspec/pts.hpp"

namespace tnspec {

inline constexpr std::size_t kOracleCap = 4096;  // max d_a*d_b for dense work

struct DensityMatrix {
  Matrix mat;  // fused (A,B) x (A,B), row index (a*d_b + b)
  std::size_t d_a = 0, d_b = 0;

  // Checks Hermiticity and unit trace (1e-10); PSD is checked by callers
  // that diagonalize anyway.
  void validate() const;
};

DensityMatrix reduce_dense(const PureState& psi, const TriPartition& part);

// Partial transpose on B by the index formula rhoT[ab,a'b'] = rho[ab',a'b].
Matrix partial_transpose(const DensityMatrix& rho);

double exact_logneg(const DensityMatrix& rho);
double purity(const DensityMatrix& rho);
double variance_bound(const DensityMatrix& rho);
double exact_entropy(const DensityMatrix& rho);

}  // namespace tnspec
