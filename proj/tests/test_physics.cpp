#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "tnspec/oracle.hpp"
#include "tnspec/physics.hpp"

using namespace tnspec;

namespace {

// Kronecker-product oracle: H = J sum_i (XX + YY + ZZ) on neighbouring sites
Matrix heisenberg_kron(std::size_t L, double j) {
  const cx I(0.0, 1.0);
  auto pauli = [&](int which) {
    Matrix p(2, 2);
    if (which == 0) { p(0, 1) = 1.0; p(1, 0) = 1.0; }
    if (which == 1) { p(0, 1) = -I; p(1, 0) = I; }
    if (which == 2) { p(0, 0) = 1.0; p(1, 1) = -1.0; }
    return p;
  };
  auto kron = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows * b.rows, a.cols * b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t jj = 0; jj < a.cols; ++jj)
        for (std::size_t k = 0; k < b.rows; ++k)
          for (std::size_t l = 0; l < b.cols; ++l)
            out(i * b.rows + k, jj * b.cols + l) = a(i, jj) * b(k, l);
    return out;
  };
  const std::size_t dim = std::size_t{1} << L;
  Matrix h(dim, dim);
  for (std::size_t bond = 0; bond + 1 < L; ++bond)
    for (int w = 0; w < 3; ++w) {
      Matrix term = Matrix::identity(1);
      for (std::size_t s = 0; s < L; ++s) {
        Matrix f = (s == bond || s == bond + 1) ? pauli(w) : Matrix::identity(2);
        term = kron(term, f);
      }
      for (std::size_t n = 0; n < h.data.size(); ++n)
        h.data[n] += j * term.data[n];
    }
  return h;
}

}  // namespace

TEST_CASE("two-site spectrum is {-3J, J, J, J}") {
  HeisenbergModel model{2, 1.3};
  Matrix h = heisenberg_dense(model);
  HermEig e = eig_hermitian_dense(h, false);
  CHECK(std::abs(e.values[0] + 3.0 * 1.3) < 1e-12);
  for (int k = 1; k < 4; ++k) CHECK(std::abs(e.values[k] - 1.3) < 1e-12);
}

TEST_CASE("matrix-free apply matches the Kronecker oracle") {
  for (std::size_t L : {3, 4, 5}) {
    HeisenbergModel model{L, 0.7};
    Matrix ref = heisenberg_kron(L, 0.7);
    Matrix dense = heisenberg_dense(model);
    CHECK(th::max_abs_diff(dense, ref) < 1e-12);
  }
}

TEST_CASE("H commutes with total sigma-z") {
  HeisenbergModel model{5, 1.0};
  Matrix h = heisenberg_dense(model);
  const std::size_t dim = 64 / 2;  // 2^5
  Matrix sz(dim, dim);
  for (std::size_t s = 0; s < dim; ++s) {
    int count = 0;
    for (std::size_t b = 0; b < 5; ++b) count += (s >> b) & 1 ? -1 : 1;
    sz(s, s) = double(count);
  }
  Matrix hs = matmul(h, sz), sh = matmul(sz, h);
  CHECK(th::max_abs_diff(hs, sh) < 1e-12);
}

TEST_CASE("MPO contracts to the dense Hamiltonian") {
  for (std::size_t L : {2, 3, 4, 6}) {
    HeisenbergModel model{L, -0.4};
    Matrix ref = heisenberg_dense(model);
    Matrix m = mpo_dense(heisenberg_mpo(model));
    CHECK(th::max_abs_diff(m, ref) < 1e-10);
  }
}

TEST_CASE("Neel state energy is -J(L-1) from the zz terms") {
  for (std::size_t L : {2, 5, 8}) {
    HeisenbergModel model{L, 1.0};
    PureState neel = neel_state(L);
    CHECK(std::abs(neel.norm() - 1.0) < 1e-14);
    HeisenbergOp op(model);
    std::vector<cx> out(op.rows());
    op.apply(neel.tensor.data().data(), out.data());
    cx e = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i)
      e += std::conj(neel.tensor.data()[i]) * out[i];
    CHECK(std::abs(e - cx(-double(L - 1))) < 1e-12);
  }
}

TEST_CASE("singlet is stationary under time evolution") {
  // |s> = (|01> - |10>)/sqrt2 is the L=2 ground state; only a phase evolves
  std::vector<cx> amps(4, cx{});
  amps[1] = 1.0 / std::sqrt(2.0);
  amps[2] = -1.0 / std::sqrt(2.0);
  PureState s = PureState::from_tensor(Tensor({{"s0", 2}, {"s1", 2}}, amps));
  HeisenbergModel model{2, 1.0};
  QuenchConfig cfg;
  cfg.dt = 0.1;
  cfg.t_max = 0.5;
  auto steps = evolve(s, model, cfg);
  REQUIRE(steps.size() == 6);
  for (auto& st : steps) {
    cx ov = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      ov += std::conj(s.tensor.data()[i]) * st.state.tensor.data()[i];
    CHECK(std::abs(std::abs(ov) - 1.0) < 1e-10);  // phase exp(3iJt)
    cx phase = std::exp(cx(0.0, 3.0 * st.t));
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(std::abs(st.state.tensor.data()[i] - phase * s.tensor.data()[i]) <
            1e-9);
  }
}

TEST_CASE("Krylov evolution matches the dense propagator at L=8") {
  const std::size_t L = 8;
  HeisenbergModel model{L, 1.0};
  PureState neel = neel_state(L);
  QuenchConfig cfg;
  cfg.dt = 0.25;
  cfg.t_max = 1.0;
  auto steps = evolve(neel, model, cfg);
  REQUIRE(steps.size() == 5);
  Matrix h = heisenberg_dense(model);
  HermEig e = eig_hermitian_dense(h, true);
  const std::size_t dim = std::size_t{1} << L;
  double e0 = 0.0;  // <psi|H|psi> is conserved
  {
    std::vector<cx> hv(dim, cx{});
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k)
        hv[i] += h(i, k) * neel.tensor.data()[k];
    cx acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      acc += std::conj(neel.tensor.data()[i]) * hv[i];
    e0 = acc.real();
  }
  for (auto& st : steps) {
    CHECK(std::abs(st.state.norm() - 1.0) < 1e-10);
    // exact: psi(t) = V exp(-i diag t) V^H psi(0)
    std::vector<cx> coef(dim, cx{});
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t i = 0; i < dim; ++i)
        coef[k] += std::conj(e.vectors(i, k)) * neel.tensor.data()[i];
    std::vector<cx> exact(dim, cx{});
    for (std::size_t k = 0; k < dim; ++k) {
      cx ph = std::exp(cx(0.0, -e.values[k] * st.t)) * coef[k];
      for (std::size_t i = 0; i < dim; ++i) exact[i] += e.vectors(i, k) * ph;
    }
    cx ov = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      ov += std::conj(exact[i]) * st.state.tensor.data()[i];
    CHECK(std::abs(ov) > 1.0 - 1e-8);
    // energy conservation
    HeisenbergOp op(model);
    std::vector<cx> hv(dim);
    op.apply(st.state.tensor.data().data(), hv.data());
    cx acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      acc += std::conj(st.state.tensor.data()[i]) * hv[i];
    CHECK(std::abs(acc.real() - e0) < 1e-8);
  }
}

TEST_CASE("dmrg finds the L=2 singlet energy") {
  HeisenbergModel model{2, 1.0};
  DmrgConfig cfg;
  cfg.chi_max = 4;
  DmrgResult r = dmrg2(heisenberg_mpo(model), cfg, 1);
  CHECK(r.converged);
  CHECK(std::abs(r.energy + 3.0) < 1e-9);
}

TEST_CASE("dmrg matches exact diagonalization at L=10") {
  HeisenbergModel model{10, 1.0};
  Matrix h = heisenberg_dense(model);
  HermEig e = eig_hermitian_dense(h, false);
  DmrgConfig cfg;
  cfg.chi_max = 32;
  cfg.cutoff = 1e-10;
  cfg.tol = 1e-10;
  DmrgResult r = dmrg2(heisenberg_mpo(model), cfg, 2);
  CHECK(r.converged);
  CHECK(std::abs(r.energy - e.values[0]) < 1e-7 * std::abs(e.values[0]));
  // ground state is normalized and has variational energy >= E0
  CHECK(r.energy >= e.values[0] - 1e-9);
  PureState gs = dense_from_mps(r.mps);
  CHECK(std::abs(gs.norm() - 1.0) < 1e-8);
}

TEST_CASE("cft_fit recovers exact synthetic coefficients") {
  // E = (c/4) log2(l/4) + K with c = 1, K = 0.5
  std::vector<std::pair<double, double>> pts;
  for (double l : {4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0})
    pts.push_back({l, 0.25 * std::log2(l / 4.0) + 0.5});
  CftFit f = cft_fit(pts, 64);
  CHECK(std::abs(f.c - 1.0) < 1e-10);
  CHECK(std::abs(f.k_const - 0.5) < 1e-10);
  CHECK(f.c_err < 1e-8);
  // points above L/2 are excluded: corrupt them and expect no change
  std::vector<std::pair<double, double>> pts2 = pts;
  pts2.push_back({40.0, -99.0});
  CftFit f2 = cft_fit(pts2, 64);
  CHECK(std::abs(f2.c - f.c) < 1e-12);
  // too few points throws
  CHECK_THROWS(cft_fit({{4.0, 0.5}, {6.0, 0.6}, {8.0, 0.7}}, 64));
}
