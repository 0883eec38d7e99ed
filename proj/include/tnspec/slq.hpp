#pragma once

#include <cstdint>
#include <vector>

#include "tnspec/linalg.hpp"

namespace tnspec {

// Scalar functions applied to the spectrum.
struct SpectralFunction {
  enum class Tag { abs, identity, xlogx_neg, exp_neg_beta, square };
  Tag tag = Tag::abs;
  double beta = 1.0;  // exp_neg_beta only

  double operator()(double x) const;

  static SpectralFunction absval() { return {Tag::abs}; }
  static SpectralFunction identity() { return {Tag::identity}; }
  static SpectralFunction xlogx_neg() { return {Tag::xlogx_neg}; }
  static SpectralFunction exp_neg(double b) { return {Tag::exp_neg_beta, b}; }
  static SpectralFunction square() { return {Tag::square}; }
};

struct SlqConfig {
  double tol = 0.01;    // relative target on the Hutchinson std-error
  double ltol = 0.001;  // relative Lanczos-fit tolerance
  std::size_t n_min = 10;
  std::size_t n_max = 400;
  std::size_t k_max = 128;
  std::uint64_t seed = 0;
  enum class VectorKind { rademacher, gaussian };
  VectorKind vector_kind = VectorKind::rademacher;

  void validate() const;
};

// Counter-based per-sample RNG stream: seed ^ splitmix64(sample index).
std::uint64_t splitmix64(std::uint64_t x);

std::vector<cx> sample_vector(std::size_t dim, std::uint64_t stream_seed,
                              SlqConfig::VectorKind kind);

struct LanczosState {
  std::vector<double> alpha;               // alpha_1..alpha_k
  std::vector<double> beta;                // beta_1..beta_{k+1}
  std::vector<std::vector<cx>> basis;      // phi_1..phi_k (reorthogonalization)
  bool invariant_subspace = false;

  std::size_t k() const { return alpha.size(); }
  TridiagonalMatrix tridiagonal() const;  // T_k
};

// Normalizes phi, records beta_1.
LanczosState lanczos_init(std::vector<cx> phi);

// One iteration with full reorthogonalization against the stored basis.
void lanczos_step(const LinOp& op, LanczosState& state);

// norm_sq * sum_j tau_j^2 f(theta_j)
double quadrature_value(const TridiagonalMatrix& t, const SpectralFunction& f,
                        double norm_sq);

struct LanczosEstimate {
  double estimate = 0.0;
  double error = 0.0;
  bool decaying = true;
};

// Exponential least-squares fit a + b r^j to the quadrature series.
LanczosEstimate lanczos_estimate(const std::vector<double>& series);

struct TraceEstimate {
  std::vector<double> samples;  // G_1..G_N
  double mean = 0.0;
  double variance = 0.0;   // sample variance of {G_n}
  double std_error = 0.0;  // sqrt(variance / N)
  std::size_t n_used = 0;
  bool converged = false;
};

double slq_single_sample(const LinOp& op, const SpectralFunction& f,
                         const SlqConfig& cfg, std::uint64_t sample_index);

// Full stochastic Lanczos quadrature estimate of Tr f(X).
TraceEstimate slq_trace(const LinOp& op, const SpectralFunction& f,
                        const SlqConfig& cfg);

}  // namespace tnspec
