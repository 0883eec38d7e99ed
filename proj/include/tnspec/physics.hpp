#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "tnspec/mps.hpp"

namespace tnspec {

// H = J sum_i sigma_i . sigma_{i+1}, Pauli convention (sigma eigenvalues
// +-1, NOT spin-1/2 operators: energies are 4x the S-convention), open chain.
struct HeisenbergModel {
  std::size_t length = 2;
  double j = 1.0;
};

Matrix heisenberg_dense(const HeisenbergModel& model);

// Matrix-free H application on the full 2^L space (site 0 = most significant
// bit, matching PureState's row-major layout).
class HeisenbergOp final : public LinOp {
 public:
  explicit HeisenbergOp(const HeisenbergModel& model);
  std::size_t rows() const override { return dim_; }
  std::size_t cols() const override { return dim_; }
  void apply(const cx* in, cx* out) const override;
  void apply_adjoint(const cx* in, cx* out) const override;

 private:
  HeisenbergModel model_;
  std::size_t dim_;
};

// Rank-4 site tensors with index order (l, pu, pd, r); pu = row (out),
// pd = column (in).  Edge tensors carry dim-1 dummy bonds.
struct Mpo {
  std::vector<Tensor> sites;
  std::size_t phys_dim = 2;

  std::size_t length() const { return sites.size(); }
};

Mpo heisenberg_mpo(const HeisenbergModel& model);
Matrix mpo_dense(const Mpo& mpo);  // test support, small L only

PureState neel_state(std::size_t length);

struct QuenchConfig {
  double dt = 0.02;  // units of 1/J
  double t_max = 1.0;
  std::size_t krylov_dim = 20;
};

struct QuenchStep {
  double t = 0.0;
  PureState state;
};

// Krylov-propagated dense time evolution d/dt psi = -i H psi; returns the
// series at t = 0, dt, 2 dt, ..., t_max.
std::vector<QuenchStep> evolve(const PureState& psi,
                               const HeisenbergModel& model,
                               const QuenchConfig& cfg);

struct DmrgConfig {
  std::size_t chi_max = 64;
  double cutoff = 1e-8;
  double tol = 1e-8;  // relative per-sweep energy change
  std::size_t max_sweeps = 40;
};

struct DmrgResult {
  Mps mps;
  double energy = 0.0;
  bool converged = false;
  std::size_t sweeps = 0;
  std::vector<double> sweep_energies;
};

DmrgResult dmrg2(const Mpo& mpo, const DmrgConfig& cfg, std::uint64_t seed);

struct CftFit {
  double c = 0.0, c_err = 0.0;
  double k_const = 0.0, k_err = 0.0;
};

// Least-squares fit E = (c/4) log2(L_AB / 4) + K over points with
// L_AB <= l_total / 2; throws with fewer than 4 admissible points.
CftFit cft_fit(const std::vector<std::pair<double, double>>& points,
               std::size_t l_total);

}  // namespace tnspec
