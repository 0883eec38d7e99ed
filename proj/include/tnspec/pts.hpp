#pragma once

#include <cstdint>
#include <vector>

#include "tnspec/linop.hpp"
#include "tnspec/slq.hpp"
#include "tnspec/tensor.hpp"

namespace tnspec {

// Site index labels are "s0".."s{L-1}", each of physical dim p.
struct PureState {
  Tensor tensor;
  std::size_t num_sites = 0;
  std::size_t phys_dim = 2;

  static PureState from_tensor(Tensor t, std::size_t p = 2);
  double norm() const { return tensor.norm(); }
};

struct TriPartition {
  std::vector<std::size_t> sites_a, sites_b, sites_c;

  // Throws unless a/b/c are disjoint, cover 0..L-1, and A, B are non-empty.
  void validate(std::size_t num_sites) const;
  std::size_t dim_a(std::size_t p) const;
  std::size_t dim_b(std::size_t p) const;
  std::size_t dim_c(std::size_t p) const;
};

// Fused rank-3 tensor psi_ABC with labels "A", "B", "C" (C is a dummy dim-1
// index when empty).
Tensor partition_state(const PureState& psi, const TriPartition& part);

// Lazy rho_AB^{T_B} operator: {psi, conj(psi)} with C joined and the B
// bra/ket labels swapped.  Left group (a, b), right group (a', b').
TnOperator build_pt_operator(const Tensor& psi_abc);

struct LognegResult {
  double value = 0.0;  // log2 trace norm, clamped at 0
  double error = 0.0;
  TraceEstimate trace;  // the underlying trace-norm estimate
};

LognegResult logneg_pts(const PureState& psi, const TriPartition& part,
                        const SlqConfig& cfg);

PureState random_pure_state(std::size_t num_sites, std::uint64_t seed,
                            std::size_t phys_dim = 2);

// Closed-form average logarithmic negativity of a random pure state for the
// tri-partition (d_a, d_b, d_c); zero below the domain edge.
double analytic_random_logneg(double d_a, double d_b, double d_c);

}  // namespace tnspec
