#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "tnspec/oracle.hpp"
#include "tnspec/slq.hpp"

using namespace tnspec;

TEST_CASE("spectral functions evaluate correctly") {
  CHECK(SpectralFunction::absval()(-2.5) == 2.5);
  CHECK(SpectralFunction::identity()(-2.5) == -2.5);
  CHECK(SpectralFunction::square()(-3.0) == 9.0);
  CHECK(std::abs(SpectralFunction::exp_neg(2.0)(1.5) - std::exp(-3.0)) < 1e-15);
  // -x log2 x, zero at and below x = 0
  CHECK(std::abs(SpectralFunction::xlogx_neg()(0.25) - 0.5) < 1e-14);
  CHECK(SpectralFunction::xlogx_neg()(0.0) == 0.0);
  CHECK(SpectralFunction::xlogx_neg()(-1.0) == 0.0);
}

TEST_CASE("lanczos ritz values converge to dense eigenvalues") {
  Matrix h = th::random_hermitian(32, 17);
  HermEig ref = eig_hermitian_dense(h, false);
  DenseOp op(h);
  std::vector<cx> phi = sample_vector(32, 1234, SlqConfig::VectorKind::gaussian);
  LanczosState st = lanczos_init(phi);
  for (std::size_t k = 0; k < 32 && !st.invariant_subspace; ++k)
    lanczos_step(op, st);
  REQUIRE(st.k() >= 30);
  TridiagEig e = eig_sym_tridiagonal(st.tridiagonal());
  // full Krylov space: Ritz values equal the full spectrum
  for (std::size_t j = 0; j < e.theta.size(); ++j)
    CHECK(std::abs(e.theta[j] - ref.values[j]) < 1e-8);
}

TEST_CASE("quadrature with identity function recovers the Rayleigh quotient") {
  Matrix h = th::random_hermitian(16, 23);
  DenseOp op(h);
  std::vector<cx> phi = sample_vector(16, 77, SlqConfig::VectorKind::rademacher);
  double norm_sq = 0.0;
  for (auto& z : phi) norm_sq += std::norm(z);
  LanczosState st = lanczos_init(phi);
  for (int k = 0; k < 16 && !st.invariant_subspace; ++k) lanczos_step(op, st);
  double q = quadrature_value(st.tridiagonal(), SpectralFunction::identity(),
                              norm_sq);
  cx ray = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    cx acc = 0.0;
    for (std::size_t j = 0; j < 16; ++j) acc += h(i, j) * phi[j];
    ray += std::conj(phi[i]) * acc;
  }
  CHECK(std::abs(q - ray.real()) < 1e-8);
}

TEST_CASE("slq with f=square matches the matvec oracle exactly per sample") {
  // f(x)=x^2: G_n = |A phi_n|^2 / ... actually phi^H A^2 phi, computable
  // directly without any spectral decomposition
  Matrix h = th::random_hermitian(24, 31);
  DenseOp op(h);
  SlqConfig cfg;
  cfg.n_max = 8;
  cfg.tol = 1e-12;  // force all 8 samples
  cfg.seed = 5;
  for (std::size_t n = 0; n < 4; ++n) {
    double g = slq_single_sample(op, SpectralFunction::square(), cfg, n);
    std::vector<cx> phi =
        sample_vector(24, cfg.seed ^ splitmix64(n), cfg.vector_kind);
    std::vector<cx> hphi(24, cx{});
    for (std::size_t i = 0; i < 24; ++i)
      for (std::size_t j = 0; j < 24; ++j) hphi[i] += h(i, j) * phi[j];
    double ref = 0.0;
    for (auto& z : hphi) ref += std::norm(z);
    CHECK(std::abs(g - ref) < 1e-8 * std::abs(ref));
  }
}

TEST_CASE("slq_trace estimates Tr|A| within stated error") {
  Matrix h = th::random_hermitian(32, 41);
  double exact = th::trace_fn(h, [](double x) { return std::abs(x); });
  DenseOp op(h);
  SlqConfig cfg;
  cfg.tol = 0.02;
  cfg.n_max = 2000;
  cfg.seed = 7;
  TraceEstimate est = slq_trace(op, SpectralFunction::absval(), cfg);
  CHECK(est.converged);
  CHECK(est.n_used >= 10);
  CHECK(std::abs(est.mean - exact) < 4.0 * est.std_error + 1e-9);
  // sample bookkeeping
  REQUIRE(est.samples.size() == est.n_used);
  double m = 0.0;
  for (double s : est.samples) m += s;
  m /= double(est.n_used);
  CHECK(std::abs(m - est.mean) < 1e-12 * std::abs(m));
}

TEST_CASE("n_min controls the sample floor") {
  Matrix h = th::random_hermitian(16, 5);
  DenseOp op(h);
  SlqConfig cfg;
  cfg.tol = 0.5;  // loose enough that the floor decides the stopping point
  cfg.seed = 11;
  cfg.n_min = 4;
  TraceEstimate est = slq_trace(op, SpectralFunction::absval(), cfg);
  CHECK(est.n_used == 4);
  cfg.n_min = 1;
  CHECK_THROWS_AS(slq_trace(op, SpectralFunction::absval(), cfg),
                  std::invalid_argument);
}

TEST_CASE("hutchinson estimator is unbiased for the trace") {
  // identity spectral function: each G_n has expectation Tr(A); average over
  // many samples and check a 4-sigma interval
  Matrix h = th::random_hermitian(48, 51);
  double exact = 0.0;
  for (std::size_t i = 0; i < 48; ++i) exact += h(i, i).real();
  DenseOp op(h);
  SlqConfig cfg;
  cfg.tol = 1e-12;  // never converges early
  cfg.n_max = 12000;
  cfg.seed = 9;
  TraceEstimate est = slq_trace(op, SpectralFunction::identity(), cfg);
  REQUIRE(est.n_used == 12000);
  CHECK(std::abs(est.mean - exact) < 4.0 * est.std_error + 1e-10);
}

TEST_CASE("slq_trace is bit-identical across runs") {
  Matrix h = th::random_hermitian(20, 61);
  DenseOp op(h);
  SlqConfig cfg;
  cfg.tol = 0.05;
  cfg.seed = 11;
  TraceEstimate a = slq_trace(op, SpectralFunction::absval(), cfg);
  TraceEstimate b = slq_trace(op, SpectralFunction::absval(), cfg);
  REQUIRE(a.n_used == b.n_used);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK(a.samples[i] == b.samples[i]);
}

TEST_CASE("sample_vector streams are deterministic and unit-variance-ish") {
  auto v1 = sample_vector(64, 100, SlqConfig::VectorKind::rademacher);
  auto v2 = sample_vector(64, 100, SlqConfig::VectorKind::rademacher);
  auto v3 = sample_vector(64, 101, SlqConfig::VectorKind::rademacher);
  REQUIRE(v1.size() == 64);
  bool same = true, diff = false;
  for (std::size_t i = 0; i < 64; ++i) {
    same = same && v1[i] == v2[i];
    diff = diff || v1[i] != v3[i];
  }
  CHECK(same);
  CHECK(diff);
  // rademacher entries have unit modulus
  for (auto& z : v1) CHECK(std::abs(std::abs(z) - 1.0) < 1e-12);
}
