#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tnspec/linalg.hpp"
#include "tnspec/pts.hpp"

namespace tnspec {

enum class Boundary { open, periodic };

// Chain of rank-3 site tensors, each with index order (l, p, r) and labels
// "l", "p", "r".  OBC edge bonds have dim 1.
struct Mps {
  std::vector<Tensor> sites;
  Boundary boundary = Boundary::open;
  std::size_t phys_dim = 2;

  std::size_t length() const { return sites.size(); }
  std::size_t bond_left(std::size_t i) const { return sites[i].indices()[0].dim; }
  std::size_t bond_right(std::size_t i) const { return sites[i].indices()[2].dim; }
  std::size_t max_chi() const;
  void validate() const;
};

Mps mps_from_dense(const PureState& psi, std::size_t chi_max, double cutoff);
PureState dense_from_mps(const Mps& m);

// Random normalized MPS (DMRG starting point); left-canonical.
Mps random_mps(std::size_t length, std::size_t phys_dim, std::size_t chi,
               std::uint64_t seed);

// Mixed-canonical form: sites < center left-isometric, sites > center
// right-isometric, norm carried at center.  OBC only.
Mps canonicalize(const Mps& m, std::size_t center);

// Contiguous blocks A and B (B strictly to the right), gap derived.
struct BlockSpec {
  std::size_t a_start = 0, a_len = 0;
  std::size_t b_start = 0, b_len = 0;

  std::size_t gap() const { return b_start - (a_start + a_len); }
  std::size_t lab() const { return a_len + b_len; }
  void validate(std::size_t length) const;
};

// Lazy transfer operator of the section starting at `sites.front()`:
// (left bond pair) <- (right bond pair), physical indices joined between the
// ket and bra layers.  `sites` is an ordered (cyclically contiguous for PBC
// wraps) site list.
TnOperator transfer_matrix(const Mps& m, const std::vector<std::size_t>& sites);

struct CompressedSection {
  enum class Kind { environment, subsystem };
  Kind kind = Kind::environment;
  std::size_t chi_l = 1, chi_r = 1;
  std::size_t rank = 0;  // retained lateral rank r
  // left_factor: ("tlk" chi_l, "tlb" chi_l, "tr" r), sqrt(s) absorbed.
  // right_factor: ("tr" r, "trk" chi_r, "trb" chi_r), sqrt(s) absorbed.
  Tensor left_factor, right_factor;
  std::vector<double> singular_values;
  // vertical decomposition output (subsystem kind only):
  // ("vq" phys_rank, "vl" chi_l, "vm" chi_r)
  Tensor vertical;
  std::size_t phys_rank = 0;
};

CompressedSection lateral_compress(const Mps& m,
                                   const std::vector<std::size_t>& sites,
                                   double cutoff,
                                   CompressedSection::Kind kind);

// Re-expose an effective physical index on a laterally compressed subsystem
// section: pivoted PSD factorization of the section Gram over the (l, m)
// bond side, factor bond becomes the new physical index (dim <= chi^2).
CompressedSection vertical_decompose(CompressedSection section, double tol);

TnOperator build_compressed_pt_operator(const Mps& m, const BlockSpec& blocks,
                                        double cutoff);

LognegResult logneg_mps_blocks(const Mps& m, const BlockSpec& blocks,
                               const SlqConfig& cfg, double cutoff);

void save_mps(const Mps& m, const std::string& dir);
Mps load_mps(const std::string& dir);

}  // namespace tnspec
