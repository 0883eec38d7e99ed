#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "helpers.hpp"
#include "tnspec/mps.hpp"
#include "tnspec/oracle.hpp"

using namespace tnspec;

namespace {

double fidelity(const PureState& a, const PureState& b) {
  cx ov = 0.0;
  for (std::size_t i = 0; i < a.tensor.size(); ++i)
    ov += std::conj(a.tensor.data()[i]) * b.tensor.data()[i];
  return std::abs(ov);
}

Mps ghz_pbc(std::size_t L) {
  // PBC GHZ at chi = 2: diagonal bond tensors, amplitude 2^{-1/2} split
  Mps m;
  m.boundary = Boundary::periodic;
  m.phys_dim = 2;
  const double w = std::pow(0.5, 0.5 / double(L));
  for (std::size_t i = 0; i < L; ++i) {
    std::vector<cx> d(2 * 2 * 2, cx{});
    // site tensor: delta(l, p, r) * w
    d[0 * 4 + 0 * 2 + 0] = w;
    d[1 * 4 + 1 * 2 + 1] = w;
    m.sites.push_back(Tensor({{"l", 2}, {"p", 2}, {"r", 2}}, std::move(d)));
  }
  return m;
}

}  // namespace

TEST_CASE("dense round trip is exact without truncation") {
  PureState psi = random_pure_state(8, 5);
  Mps m = mps_from_dense(psi, 16, 0.0);
  m.validate();
  CHECK(m.max_chi() <= 16);
  PureState back = dense_from_mps(m);
  CHECK(fidelity(psi, back) > 1.0 - 1e-12);
}

TEST_CASE("truncation keeps the state normalized and close") {
  PureState psi = random_pure_state(8, 6);
  Mps m = mps_from_dense(psi, 6, 1e-12);
  CHECK(m.max_chi() <= 6);
  PureState back = dense_from_mps(m);
  CHECK(std::abs(back.norm() - 1.0) < 1e-10);
  CHECK(fidelity(psi, back) > 0.8);  // random states truncate badly but not absurdly
}

TEST_CASE("Bell x |0> compresses to bond dimension 2") {
  PureState bell = th::bell_state();
  std::vector<cx> amps(8, cx{});
  amps[0 * 1 + 0] = 1.0 / std::sqrt(2.0);  // |000>
  amps[6] = 1.0 / std::sqrt(2.0);          // |110>
  PureState psi = PureState::from_tensor(
      Tensor({{"s0", 2}, {"s1", 2}, {"s2", 2}}, std::move(amps)));
  Mps m = mps_from_dense(psi, 16, 1e-12);
  CHECK(m.bond_right(0) == 2);
  CHECK(m.bond_right(1) == 1);
  CHECK(m.max_chi() == 2);
  (void)bell;
}

TEST_CASE("canonicalize yields left/right isometries around the center") {
  PureState psi = random_pure_state(7, 9);
  Mps m = mps_from_dense(psi, 16, 0.0);
  const std::size_t center = 3;
  Mps c = canonicalize(m, center);
  PureState back = dense_from_mps(c);
  CHECK(fidelity(psi, back) > 1.0 - 1e-10);
  for (std::size_t i = 0; i < c.length(); ++i) {
    const Tensor& t = c.sites[i];
    const std::size_t dl = t.dim("l"), dp = t.dim("p"), dr = t.dim("r");
    if (i < center) {  // sum_{l,p} conj(A[l,p,r]) A[l,p,r'] = delta
      Matrix g(dr, dr);
      for (std::size_t r = 0; r < dr; ++r)
        for (std::size_t rp = 0; rp < dr; ++rp) {
          cx acc = 0.0;
          for (std::size_t l = 0; l < dl; ++l)
            for (std::size_t p = 0; p < dp; ++p)
              acc += std::conj(t.at({l, p, r})) * t.at({l, p, rp});
          g(r, rp) = acc;
        }
      CHECK(th::max_abs_diff(g, Matrix::identity(dr)) < 1e-10);
    } else if (i > center) {  // sum_{p,r} B[l,p,r] conj(B[l',p,r]) = delta
      Matrix g(dl, dl);
      for (std::size_t l = 0; l < dl; ++l)
        for (std::size_t lp = 0; lp < dl; ++lp) {
          cx acc = 0.0;
          for (std::size_t p = 0; p < dp; ++p)
            for (std::size_t r = 0; r < dr; ++r)
              acc += t.at({l, p, r}) * std::conj(t.at({lp, p, r}));
          g(l, lp) = acc;
        }
      CHECK(th::max_abs_diff(g, Matrix::identity(dl)) < 1e-10);
    }
  }
}

TEST_CASE("transfer matrix equals the explicit element-wise contraction") {
  PureState psi = random_pure_state(5, 12);
  Mps m = mps_from_dense(psi, 8, 0.0);
  std::vector<std::size_t> sec = {1, 2};
  TnOperator op = transfer_matrix(m, sec);
  Matrix dense = to_dense(op);
  const std::size_t cl = m.bond_left(1), cr = m.bond_right(2);
  const std::size_t mid = m.bond_right(1);
  REQUIRE(dense.rows == cl * cl);
  REQUIRE(dense.cols == cr * cr);
  for (std::size_t kl = 0; kl < cl; ++kl)
    for (std::size_t bl = 0; bl < cl; ++bl)
      for (std::size_t kr = 0; kr < cr; ++kr)
        for (std::size_t br = 0; br < cr; ++br) {
          cx acc = 0.0;
          for (std::size_t p1 = 0; p1 < 2; ++p1)
            for (std::size_t p2 = 0; p2 < 2; ++p2)
              for (std::size_t km = 0; km < mid; ++km)
                for (std::size_t bm = 0; bm < mid; ++bm)
                  acc += m.sites[1].at({kl, p1, km}) *
                         std::conj(m.sites[1].at({bl, p1, bm})) *
                         m.sites[2].at({km, p2, kr}) *
                         std::conj(m.sites[2].at({bm, p2, br}));
          CHECK(std::abs(dense(kl * cl + bl, kr * cr + br) - acc) < 1e-12);
        }
}

TEST_CASE("separable sections compress to lateral rank 1") {
  PureState psi = th::product_zero_state(8);
  Mps m = mps_from_dense(psi, 4, 1e-12);
  CompressedSection cs = lateral_compress(m, {2, 3, 4}, 1e-10,
                                          CompressedSection::Kind::environment);
  CHECK(cs.rank == 1);
}

TEST_CASE("lateral factors reconstruct the transfer matrix") {
  PureState psi = random_pure_state(8, 14);
  Mps m = mps_from_dense(psi, 8, 0.0);
  std::vector<std::size_t> sec = {3, 4};
  CompressedSection cs = lateral_compress(m, sec, 1e-12,
                                          CompressedSection::Kind::environment);
  Matrix dense = to_dense(transfer_matrix(m, sec));
  // contract left_factor ("tlk","tlb","tr") with right_factor ("tr","trk","trb")
  Tensor rec = contract_pair(cs.left_factor, cs.right_factor);
  const std::size_t cl = cs.chi_l, cr = cs.chi_r;
  for (std::size_t kl = 0; kl < cl; ++kl)
    for (std::size_t bl = 0; bl < cl; ++bl)
      for (std::size_t kr = 0; kr < cr; ++kr)
        for (std::size_t br = 0; br < cr; ++br)
          CHECK(std::abs(rec.at({kl, bl, kr, br}) -
                         dense(kl * cl + bl, kr * cr + br)) < 1e-8);
}

TEST_CASE("vertical decomposition reproduces the section Gram") {
  PureState psi = random_pure_state(8, 15);
  Mps m = mps_from_dense(psi, 8, 0.0);
  std::vector<std::size_t> sec = {2, 3};
  CompressedSection cs = lateral_compress(m, sec, 1e-12,
                                          CompressedSection::Kind::subsystem);
  cs = vertical_decompose(std::move(cs), 1e-12);
  REQUIRE(cs.phys_rank > 0);
  // E = vertical ("vq","vl","vm"); check sum_q conj(E[q,l,m]) E[q,l',m'] ==
  // G[(l,m),(l',m')] = conj(T[(l,l'),(m,m')])
  Matrix dense = to_dense(transfer_matrix(m, sec));
  const std::size_t cl = cs.chi_l, cr = cs.chi_r;
  for (std::size_t l = 0; l < cl; ++l)
    for (std::size_t mm = 0; mm < cr; ++mm)
      for (std::size_t lp = 0; lp < cl; ++lp)
        for (std::size_t mp = 0; mp < cr; ++mp) {
          cx acc = 0.0;
          for (std::size_t q = 0; q < cs.phys_rank; ++q)
            acc += std::conj(cs.vertical.at({q, l, mm})) *
                   cs.vertical.at({q, lp, mp});
          cx g = std::conj(dense(l * cl + lp, mm * cr + mp));
          CHECK(std::abs(acc - g) < 1e-7);
        }
}

TEST_CASE("compressed PT operator matches the dense oracle") {
  struct Case { std::size_t L; BlockSpec blocks; };
  std::vector<Case> cases = {
      {8, {2, 2, 4, 2}},    // gap 0, environment on both ends
      {8, {1, 2, 5, 2}},    // gap 2
      {10, {2, 2, 6, 2}},   // gap 2, L = 10
      {10, {0, 3, 3, 2}},   // A at the edge, gap 0
  };
  for (auto& c : cases) {
    PureState psi = random_pure_state(c.L, 40 + c.L + c.blocks.a_start);
    Mps m = mps_from_dense(psi, 64, 0.0);
    TnOperator op = build_compressed_pt_operator(m, c.blocks, 1e-12);
    // dense oracle over the same bipartition
    TriPartition part;
    for (std::size_t i = 0; i < c.L; ++i) {
      if (i >= c.blocks.a_start && i < c.blocks.a_start + c.blocks.a_len)
        part.sites_a.push_back(i);
      else if (i >= c.blocks.b_start && i < c.blocks.b_start + c.blocks.b_len)
        part.sites_b.push_back(i);
      else
        part.sites_c.push_back(i);
    }
    Matrix ref = partial_transpose(reduce_dense(psi, part));
    Matrix lazy = to_dense(op);
    REQUIRE(lazy.rows == ref.rows);
    CHECK(th::max_abs_diff(lazy, ref) < 1e-7);
  }
}

TEST_CASE("product state has zero block negativity") {
  PureState psi = th::product_zero_state(10);
  Mps m = mps_from_dense(psi, 4, 1e-12);
  SlqConfig cfg;
  cfg.tol = 0.02;
  cfg.seed = 3;
  LognegResult r = logneg_mps_blocks(m, {2, 2, 6, 2}, cfg, 1e-10);
  CHECK(r.value < 1e-12);  // clamped at T = 1 up to roundoff
}

TEST_CASE("block negativity agrees with the dense oracle at L=10") {
  PureState psi = random_pure_state(10, 90);
  Mps m = mps_from_dense(psi, 64, 0.0);
  BlockSpec blocks{3, 2, 6, 2};
  TriPartition part{{3, 4}, {6, 7}, {0, 1, 2, 5, 8, 9}};
  double exact = exact_logneg(reduce_dense(psi, part));
  SlqConfig cfg;
  cfg.tol = 0.01;
  cfg.n_max = 600;
  cfg.seed = 8;
  LognegResult r = logneg_mps_blocks(m, blocks, cfg, 1e-10);
  CHECK(std::abs(r.value - exact) < 3.0 * r.error + 0.02);
}

TEST_CASE("save and load round trip") {
  PureState psi = random_pure_state(6, 101);
  Mps m = mps_from_dense(psi, 8, 1e-12);
  std::string dir = "mps_io_test_dir";
  save_mps(m, dir);
  Mps back = load_mps(dir);
  REQUIRE(back.length() == m.length());
  CHECK(back.boundary == m.boundary);
  for (std::size_t i = 0; i < m.length(); ++i) {
    REQUIRE(back.sites[i].size() == m.sites[i].size());
    for (std::size_t k = 0; k < m.sites[i].size(); ++k)
      CHECK(back.sites[i].data()[k] == m.sites[i].data()[k]);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("PBC GHZ state at chi = 2") {
  Mps m = ghz_pbc(6);
  m.validate();
  CHECK(m.max_chi() == 2);
  PureState dense = dense_from_mps(m);
  CHECK(std::abs(dense.norm() - 1.0) < 1e-12);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(dense.tensor.data()[0] - cx(r)) < 1e-12);
  CHECK(std::abs(dense.tensor.data()[63] - cx(r)) < 1e-12);
  double mass = 0.0;
  for (std::size_t i = 1; i < 63; ++i) mass += std::norm(dense.tensor.data()[i]);
  CHECK(mass < 1e-12);

  // adjacent qubit blocks of a GHZ state are PPT: rho_AB is separable
  SlqConfig cfg;
  cfg.tol = 0.02;
  cfg.seed = 5;
  LognegResult r2 = logneg_mps_blocks(m, {1, 1, 2, 1}, cfg, 1e-10);
  CHECK(r2.value < 0.05);
}
