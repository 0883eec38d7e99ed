#pragma once

#include <complex>
#include <random>
#include <vector>

#include "tnspec/linalg.hpp"
#include "tnspec/pts.hpp"

namespace th {

using tnspec::cx;
using tnspec::Matrix;

inline Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(r, c);
  for (auto& z : m.data) z = cx(g(rng), g(rng));
  return m;
}

inline Matrix random_hermitian(std::size_t n, std::uint64_t seed) {
  Matrix a = random_matrix(n, n, seed);
  Matrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      h(i, j) = (a(i, j) + std::conj(a(j, i))) * 0.5;
  return h;
}

inline Matrix random_psd(std::size_t n, std::uint64_t seed) {
  Matrix a = random_matrix(n, n, seed);
  return tnspec::matmul(a, a.adjoint());
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

// |phi+> = (|00> + |11>)/sqrt2 on two qubits
inline tnspec::PureState bell_state() {
  std::vector<cx> amps(4, cx{});
  const double r = 1.0 / std::sqrt(2.0);
  amps[0] = r;
  amps[3] = r;
  tnspec::Tensor t({{"s0", 2}, {"s1", 2}}, std::move(amps));
  return tnspec::PureState::from_tensor(std::move(t));
}

inline tnspec::PureState product_zero_state(std::size_t L) {
  std::vector<tnspec::Index> idx;
  for (std::size_t i = 0; i < L; ++i)
    idx.push_back({"s" + std::to_string(i), 2});
  std::vector<cx> amps(std::size_t{1} << L, cx{});
  amps[0] = 1.0;
  tnspec::PureState psi;
  psi.tensor = tnspec::Tensor(std::move(idx), std::move(amps));
  psi.num_sites = L;
  psi.phys_dim = 2;
  return psi;
}

// dense f(H) via eigendecomposition
template <typename F>
Matrix matrix_function(const Matrix& h, F f) {
  tnspec::HermEig e = tnspec::eig_hermitian_dense(h, true);
  const std::size_t n = h.rows;
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cx acc = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        acc += e.vectors(i, k) * f(e.values[k]) * std::conj(e.vectors(j, k));
      out(i, j) = acc;
    }
  return out;
}

inline double trace_fn(const Matrix& h, double (*f)(double)) {
  tnspec::HermEig e = tnspec::eig_hermitian_dense(h, false);
  double s = 0.0;
  for (double v : e.values) s += f(v);
  return s;
}

}  // namespace th
