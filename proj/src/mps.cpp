#include "tnspec/mps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "tnspec/kernels.hpp"

namespace tnspec {

namespace {

Tensor site_tensor(std::size_t dl, std::size_t p, std::size_t dr,
                   std::vector<cx> data) {
  return Tensor({{"l", dl}, {"p", p}, {"r", dr}}, std::move(data));
}

std::string lbl(const char* stem, std::size_t i) {
  return std::string(stem) + std::to_string(i);
}

// p^len, saturating just above `limit` so comparisons stay exact.
std::size_t pow_capped(std::size_t p, std::size_t len, std::size_t limit) {
  std::size_t acc = 1;
  for (std::size_t i = 0; i < len; ++i) {
    if (acc > limit) return acc;
    acc *= p;
  }
  return acc;
}

}  // namespace

std::size_t Mps::max_chi() const {
  std::size_t chi = 1;
  for (const Tensor& t : sites) chi = std::max(chi, t.indices()[0].dim);
  return chi;
}

void Mps::validate() const {
  if (sites.empty()) throw std::invalid_argument("Mps: empty chain");
  for (const Tensor& t : sites) {
    if (t.rank() != 3 || t.indices()[0].label != "l" ||
        t.indices()[1].label != "p" || t.indices()[2].label != "r")
      throw std::invalid_argument("Mps: site tensors must be (l, p, r)");
    if (t.indices()[1].dim != phys_dim)
      throw std::invalid_argument("Mps: physical dim mismatch");
  }
  const std::size_t n = sites.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (bond_right(i) != bond_left(i + 1))
      throw std::invalid_argument("Mps: adjacent bond dims differ");
  if (boundary == Boundary::open) {
    if (bond_left(0) != 1 || bond_right(n - 1) != 1)
      throw std::invalid_argument("Mps: OBC edge bonds must have dim 1");
  } else if (bond_right(n - 1) != bond_left(0)) {
    throw std::invalid_argument("Mps: PBC wrap bond dims differ");
  }
}

void BlockSpec::validate(std::size_t length) const {
  if (a_len == 0 || b_len == 0)
    throw std::invalid_argument("BlockSpec: empty block");
  if (b_start < a_start + a_len)
    throw std::invalid_argument("BlockSpec: blocks overlap or out of order");
  if (b_start + b_len > length)
    throw std::invalid_argument("BlockSpec: block past chain end");
}

Mps mps_from_dense(const PureState& psi, std::size_t chi_max, double cutoff) {
  const std::size_t L = psi.num_sites, p = psi.phys_dim;
  if (L == 0) throw std::invalid_argument("mps_from_dense: empty state");
  Mps m;
  m.phys_dim = p;
  std::vector<cx> rest = psi.tensor.data();
  std::size_t chi = 1;
  std::size_t rem = rest.size();  // columns of the (chi, rem) working matrix
  for (std::size_t k = 0; k + 1 < L; ++k) {
    const std::size_t rows = chi * p, cols = rem / p;
    Matrix mat(rows, cols);
    mat.data = rest;
    SvdResult sv = svd(mat);
    const double smax = sv.s.empty() ? 0.0 : sv.s[0];
    std::size_t keep = 0;
    while (keep < sv.s.size() && keep < chi_max && sv.s[keep] >= cutoff * smax)
      ++keep;
    if (keep == 0) keep = 1;
    std::vector<cx> a(rows * keep);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < keep; ++j) a[i * keep + j] = sv.u(i, j);
    m.sites.push_back(site_tensor(chi, p, keep, std::move(a)));
    rest.assign(keep * cols, cx{});
    for (std::size_t i = 0; i < keep; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        rest[i * cols + j] = sv.vh(i, j) * static_cast<real_t>(sv.s[i]);
    chi = keep;
    rem = cols;
  }
  // last site carries what is left; renormalize so truncation keeps norm 1
  double nrm = 0.0;
  for (const cx& z : rest) nrm += std::norm(z);
  nrm = std::sqrt(nrm);
  if (nrm > 0.0)
    for (cx& z : rest) z *= static_cast<real_t>(1.0 / nrm);
  m.sites.push_back(site_tensor(chi, p, 1, std::move(rest)));
  m.validate();
  return m;
}

PureState dense_from_mps(const Mps& m) {
  m.validate();
  const std::size_t L = m.length(), p = m.phys_dim;
  const std::size_t full = pow_capped(p, L, (1ull << 24));
  if (full > (1ull << 24)) throw std::invalid_argument("dense_from_mps: over cap");
  const std::size_t chi0 = m.bond_left(0);
  // accumulate (chi0 * p^k, chi) row-major
  std::vector<cx> acc(m.sites[0].data());
  std::size_t rows = chi0 * p, chi = m.bond_right(0);
  for (std::size_t i = 1; i < L; ++i) {
    const std::size_t dr = m.bond_right(i);
    std::vector<cx> next(rows * p * dr);
    gemm(acc.data(), m.sites[i].data().data(), next.data(), rows, chi, p * dr);
    acc = std::move(next);
    rows *= p;
    chi = dr;
  }
  std::vector<cx> vec(full, cx{});
  if (m.boundary == Boundary::open) {
    vec = std::move(acc);  // chi0 = chi = 1
  } else {
    for (std::size_t a = 0; a < chi0; ++a)
      for (std::size_t s = 0; s < full; ++s)
        vec[s] += acc[(a * full + s) * chi + a];
  }
  std::vector<Index> idx;
  for (std::size_t i = 0; i < L; ++i) idx.push_back({lbl("s", i), p});
  PureState psi;
  psi.tensor = Tensor(std::move(idx), std::move(vec));
  psi.num_sites = L;
  psi.phys_dim = p;
  return psi;
}

Mps random_mps(std::size_t length, std::size_t phys_dim, std::size_t chi,
               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mps m;
  m.phys_dim = phys_dim;
  std::size_t dl = 1;
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t from_right = pow_capped(phys_dim, length - i - 1, chi);
    std::size_t dr = std::min(chi, std::min(dl * phys_dim, from_right));
    if (i + 1 == length) dr = 1;
    std::vector<cx> data(dl * phys_dim * dr);
    for (cx& z : data)
      z = cx(static_cast<real_t>(gauss(rng)), static_cast<real_t>(gauss(rng)));
    m.sites.push_back(site_tensor(dl, phys_dim, dr, std::move(data)));
    dl = dr;
  }
  return canonicalize(m, 0);
}

Mps canonicalize(const Mps& m, std::size_t center) {
  if (m.boundary != Boundary::open)
    throw std::invalid_argument("canonicalize: OBC only");
  m.validate();
  const std::size_t L = m.length(), p = m.phys_dim;
  if (center >= L) throw std::invalid_argument("canonicalize: bad center");
  std::vector<std::vector<cx>> data;
  std::vector<std::size_t> dls(L), drs(L);
  for (std::size_t i = 0; i < L; ++i) {
    data.push_back(m.sites[i].data());
    dls[i] = m.bond_left(i);
    drs[i] = m.bond_right(i);
  }
  for (std::size_t i = 0; i < center; ++i) {
    Matrix mat(dls[i] * p, drs[i]);
    mat.data = data[i];
    Matrix q, r;
    qr(mat, q, r);
    const std::size_t k = q.cols;
    data[i] = q.data;
    drs[i] = k;
    dls[i + 1] = k;
    std::vector<cx> nxt(k * p * drs[i + 1]);
    gemm(r.data.data(), data[i + 1].data(), nxt.data(), k, r.cols,
         p * drs[i + 1]);
    data[i + 1] = std::move(nxt);
  }
  for (std::size_t i = L - 1; i > center; --i) {
    Matrix mat(dls[i], p * drs[i]);
    mat.data = data[i];
    Matrix l, q;
    lq(mat, l, q);
    const std::size_t k = q.rows;
    data[i] = q.data;
    dls[i] = k;
    drs[i - 1] = k;
    std::vector<cx> nxt(dls[i - 1] * p * k);
    gemm(data[i - 1].data(), l.data.data(), nxt.data(), dls[i - 1] * p, l.rows,
         k);
    data[i - 1] = std::move(nxt);
  }
  double nrm = 0.0;
  for (const cx& z : data[center]) nrm += std::norm(z);
  nrm = std::sqrt(nrm);
  if (nrm > 0.0)
    for (cx& z : data[center]) z *= static_cast<real_t>(1.0 / nrm);
  Mps out;
  out.boundary = Boundary::open;
  out.phys_dim = p;
  for (std::size_t i = 0; i < L; ++i)
    out.sites.push_back(site_tensor(dls[i], p, drs[i], std::move(data[i])));
  out.validate();
  return out;
}

TnOperator transfer_matrix(const Mps& m,
                           const std::vector<std::size_t>& sites) {
  if (sites.empty()) throw std::invalid_argument("transfer_matrix: empty section");
  const std::size_t L = m.length();
  TensorNetwork net;
  for (std::size_t j = 0; j < sites.size(); ++j) {
    const std::size_t s = sites[j];
    if (s >= L) throw std::invalid_argument("transfer_matrix: site out of range");
    if (j + 1 < sites.size() && m.bond_right(s) != m.bond_left(sites[j + 1]))
      throw std::invalid_argument("transfer_matrix: non-contiguous section");
    Tensor ket = relabel(m.sites[s],
                         {{"l", lbl("tb", j)}, {"p", lbl("tp", j)},
                          {"r", lbl("tb", j + 1)}});
    Tensor bra = conjugate(relabel(
        m.sites[s], {{"l", lbl("tc", j)}, {"p", lbl("tp", j)},
                     {"r", lbl("tc", j + 1)}}));
    net.tensors.push_back(std::move(ket));
    net.tensors.push_back(std::move(bra));
  }
  const std::string last_b = lbl("tb", sites.size());
  const std::string last_c = lbl("tc", sites.size());
  return TnOperator(std::move(net), {"tb0", "tc0"}, {last_b, last_c});
}

CompressedSection lateral_compress(const Mps& m,
                                   const std::vector<std::size_t>& sites,
                                   double cutoff,
                                   CompressedSection::Kind kind) {
  TnOperator op = transfer_matrix(m, sites);
  const std::size_t chi_l = m.bond_left(sites.front());
  const std::size_t chi_r = m.bond_right(sites.back());
  const std::size_t max_rank = std::min(op.rows(), op.cols());
  std::size_t cap = std::min<std::size_t>(64, max_rank);
  SvdResult sv;
  for (;;) {
    sv = truncated_svd(op, cutoff, cap, 0x1a7ea1u + cap);
    if (!sv.rank_cap_hit || cap >= max_rank) break;
    cap = std::min(cap * 2, max_rank);
  }
  const std::size_t r = sv.s.size();
  CompressedSection cs;
  cs.kind = kind;
  cs.chi_l = chi_l;
  cs.chi_r = chi_r;
  cs.rank = r;
  cs.singular_values = sv.s;
  std::vector<cx> ldata(chi_l * chi_l * r), rdata(r * chi_r * chi_r);
  for (std::size_t i = 0; i < chi_l * chi_l; ++i)
    for (std::size_t j = 0; j < r; ++j)
      ldata[i * r + j] = sv.u(i, j) * static_cast<real_t>(std::sqrt(sv.s[j]));
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < chi_r * chi_r; ++i)
      rdata[j * chi_r * chi_r + i] =
          sv.vh(j, i) * static_cast<real_t>(std::sqrt(sv.s[j]));
  cs.left_factor =
      Tensor({{"tlk", chi_l}, {"tlb", chi_l}, {"tr", r}}, std::move(ldata));
  cs.right_factor =
      Tensor({{"tr", r}, {"trk", chi_r}, {"trb", chi_r}}, std::move(rdata));
  return cs;
}

CompressedSection vertical_decompose(CompressedSection section, double tol) {
  const std::size_t chi_l = section.chi_l, chi_r = section.chi_r;
  const std::size_t r = section.rank;
  const std::size_t n = chi_l * chi_r;
  const std::vector<cx>& lf = section.left_factor.data();   // (lk, lb, r)
  const std::vector<cx>& rf = section.right_factor.data();  // (r, rk, rb)
  // Gram over the ket bond pair: G[(l,m),(l',m')] = conj(T[(l,l'),(m,m')])
  std::vector<double> diag(n);
  for (std::size_t l = 0; l < chi_l; ++l)
    for (std::size_t mm = 0; mm < chi_r; ++mm) {
      cx acc = 0.0;
      for (std::size_t k = 0; k < r; ++k)
        acc += lf[(l * chi_l + l) * r + k] * rf[(k * chi_r + mm) * chi_r + mm];
      diag[l * chi_r + mm] = std::max(acc.real(), 0.0);
    }
  auto column = [&](std::size_t j, cx* out) {
    const std::size_t lp = j / chi_r, mp = j % chi_r;
    std::vector<cx> la(chi_l * r), rb(r * chi_r), prod(chi_l * chi_r);
    for (std::size_t l = 0; l < chi_l; ++l)
      for (std::size_t k = 0; k < r; ++k)
        la[l * r + k] = lf[(l * chi_l + lp) * r + k];
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t mm = 0; mm < chi_r; ++mm)
        rb[k * chi_r + mm] = rf[(k * chi_r + mm) * chi_r + mp];
    gemm(la.data(), rb.data(), prod.data(), chi_l, r, chi_r);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::conj(prod[i]);
  };
  PivotedPsdResult fac = pivoted_psd_factor(n, diag, column, tol, n);
  std::size_t q = fac.factor.cols;
  std::vector<cx> vdata;
  if (q == 0) {
    q = 1;
    vdata.assign(n, cx{});
  } else {
    vdata.resize(q * n);
    for (std::size_t k = 0; k < q; ++k)
      for (std::size_t i = 0; i < n; ++i)
        vdata[k * n + i] = std::conj(fac.factor(i, k));
  }
  section.phys_rank = q;
  section.vertical =
      Tensor({{"vq", q}, {"vl", chi_l}, {"vm", chi_r}}, std::move(vdata));
  return section;
}

namespace {

struct PtAssembly {
  TensorNetwork net;
  std::vector<std::string> left, right;
};

bool worthwhile(std::size_t p, std::size_t len, std::size_t chi_l,
                std::size_t chi_r) {
  const std::size_t pair = chi_l * chi_r;
  return pow_capped(p, len, pair) > pair;
}

}  // namespace

TnOperator build_compressed_pt_operator(const Mps& m, const BlockSpec& blocks,
                                        double cutoff) {
  m.validate();
  const std::size_t L = m.length(), p = m.phys_dim;
  blocks.validate(L);
  const bool obc = m.boundary == Boundary::open;
  const std::size_t a0 = blocks.a_start, a1 = a0 + blocks.a_len;
  const std::size_t b0 = blocks.b_start, b1 = b0 + blocks.b_len;

  const Mps w = obc ? canonicalize(m, a0) : m;

  PtAssembly out;
  // bond labels, cyclic position i in 0..L; ket "kb i", bra "cb i".
  // OBC environment elimination merges the bra bond into the ket bond at the
  // two outer boundaries.
  auto kb = [&](std::size_t i) { return lbl("kb", obc ? i : i % L); };
  auto cb = [&](std::size_t i, bool merged) {
    return merged ? kb(i) : lbl("cb", obc ? i : i % L);
  };
  const bool merge_l = obc, merge_r = obc;

  std::vector<std::string> a_out, a_in, b_out, b_in;

  // subsystem section: vertical-decomposed single pair or raw sites
  auto add_subsystem = [&](std::size_t s0, std::size_t s1, bool is_b) {
    std::vector<std::size_t> sec;
    for (std::size_t i = s0; i < s1; ++i) sec.push_back(i);
    const std::size_t chi_l = w.bond_left(s0), chi_r = w.bond_right(s1 - 1);
    const bool lmerge = merge_l && s0 == a0;
    const bool rmerge = merge_r && s1 == b1;
    auto& outs = is_b ? b_out : a_out;
    auto& ins = is_b ? b_in : a_in;
    const char* stem = is_b ? "PB" : "PA";
    if (worthwhile(p, s1 - s0, chi_l, chi_r)) {
      CompressedSection cs = vertical_decompose(
          lateral_compress(w, sec, cutoff, CompressedSection::Kind::subsystem),
          cutoff);
      Tensor ket = relabel(cs.vertical, {{"vq", lbl(stem, 0) + "k"},
                                         {"vl", kb(s0)},
                                         {"vm", kb(s1)}});
      Tensor bra = conjugate(cs.vertical);
      bra = relabel(bra, {{"vq", lbl(stem, 0) + "b"},
                          {"vl", cb(s0, lmerge)},
                          {"vm", cb(s1, rmerge)}});
      out.net.tensors.push_back(std::move(ket));
      out.net.tensors.push_back(std::move(bra));
      // partial transpose: B's ket phys is the column side
      outs.push_back(lbl(stem, 0) + (is_b ? "b" : "k"));
      ins.push_back(lbl(stem, 0) + (is_b ? "k" : "b"));
    } else {
      for (std::size_t i = s0; i < s1; ++i) {
        Tensor ket = relabel(w.sites[i], {{"l", kb(i)},
                                          {"p", lbl(stem, i) + "k"},
                                          {"r", kb(i + 1)}});
        Tensor bra = conjugate(w.sites[i]);
        bra = relabel(bra, {{"l", cb(i, merge_l && i == a0 && !is_b)},
                            {"p", lbl(stem, i) + "b"},
                            {"r", cb(i + 1, merge_r && i + 1 == b1 && is_b)}});
        out.net.tensors.push_back(std::move(ket));
        out.net.tensors.push_back(std::move(bra));
        outs.push_back(lbl(stem, i) + (is_b ? "b" : "k"));
        ins.push_back(lbl(stem, i) + (is_b ? "k" : "b"));
      }
    }
  };

  // environment section (phys traced): compressed factor pair or raw sites
  auto add_environment = [&](const std::vector<std::size_t>& sec,
                             const char* stem, bool force_compress,
                             bool pbc_outer) {
    if (sec.empty()) return;
    const std::size_t s_first = sec.front(), s_last = sec.back();
    const std::size_t chi_l = w.bond_left(s_first);
    const std::size_t chi_r = w.bond_right(s_last);
    if (force_compress || worthwhile(p, sec.size(), chi_l, chi_r)) {
      CompressedSection cs = lateral_compress(
          w, sec, cutoff, CompressedSection::Kind::environment);
      std::size_t r = cs.rank;
      if (pbc_outer && r > 1 &&
          cs.singular_values[0] > 1e10 * cs.singular_values[1])
        r = 1;  // separable outer environment: drop the loop
      Tensor lf = cs.left_factor, rf = cs.right_factor;
      if (r != cs.rank) {
        std::vector<cx> ld(chi_l * chi_l * r), rd(r * chi_r * chi_r);
        for (std::size_t i = 0; i < chi_l * chi_l; ++i)
          for (std::size_t j = 0; j < r; ++j)
            ld[i * r + j] = lf.data()[i * cs.rank + j];
        for (std::size_t j = 0; j < r; ++j)
          for (std::size_t i = 0; i < chi_r * chi_r; ++i)
            rd[j * chi_r * chi_r + i] = rf.data()[j * chi_r * chi_r + i];
        lf = Tensor({{"tlk", chi_l}, {"tlb", chi_l}, {"tr", r}}, std::move(ld));
        rf = Tensor({{"tr", r}, {"trk", chi_r}, {"trb", chi_r}},
                    std::move(rd));
      }
      const std::string rank_lbl = std::string(stem) + "rank";
      out.net.tensors.push_back(relabel(lf, {{"tlk", kb(s_first)},
                                             {"tlb", cb(s_first, false)},
                                             {"tr", rank_lbl}}));
      out.net.tensors.push_back(relabel(rf, {{"tr", rank_lbl},
                                             {"trk", kb(s_last + 1)},
                                             {"trb", cb(s_last + 1, false)}}));
    } else {
      for (std::size_t j = 0; j < sec.size(); ++j) {
        const std::size_t i = sec[j];
        const std::string pl = std::string(stem) + lbl("p", j);
        out.net.tensors.push_back(relabel(
            w.sites[i], {{"l", kb(i)}, {"p", pl}, {"r", kb(i + 1)}}));
        Tensor bra = conjugate(w.sites[i]);
        out.net.tensors.push_back(relabel(
            bra, {{"l", cb(i, false)}, {"p", pl}, {"r", cb(i + 1, false)}}));
      }
    }
  };

  add_subsystem(a0, a1, false);
  if (b0 > a1) {
    std::vector<std::size_t> gap;
    for (std::size_t i = a1; i < b0; ++i) gap.push_back(i);
    add_environment(gap, "g", false, false);
  }
  add_subsystem(b0, b1, true);
  if (!obc) {
    std::vector<std::size_t> env;
    for (std::size_t i = b1; i < L; ++i) env.push_back(i);
    for (std::size_t i = 0; i < a0; ++i) env.push_back(i);
    add_environment(env, "e", true, true);
  }

  out.left = a_out;
  out.left.insert(out.left.end(), b_out.begin(), b_out.end());
  out.right = a_in;
  out.right.insert(out.right.end(), b_in.begin(), b_in.end());
  return TnOperator(std::move(out.net), std::move(out.left),
                    std::move(out.right));
}

LognegResult logneg_mps_blocks(const Mps& m, const BlockSpec& blocks,
                               const SlqConfig& cfg, double cutoff) {
  TnOperator op = build_compressed_pt_operator(m, blocks, cutoff);
  LognegResult res;
  res.trace = slq_trace(op, SpectralFunction::absval(), cfg);
  const double t = std::max(res.trace.mean, 1.0);
  res.value = std::log2(t);
  res.error = res.trace.std_error / (t * std::log(2.0));
  return res;
}

void save_mps(const Mps& m, const std::string& dir) {
  m.validate();
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["format_version"] = 1;
  manifest["L"] = m.length();
  manifest["phys_dim"] = m.phys_dim;
  manifest["boundary"] = m.boundary == Boundary::open ? "open" : "periodic";
  manifest["scalar"] = "complex128";
  manifest["endianness"] = "little";
  nlohmann::json sites = nlohmann::json::array();
  for (std::size_t i = 0; i < m.length(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "site_%03zu.bin", i);
    sites.push_back({{"file", name},
                     {"left", m.bond_left(i)},
                     {"phys", m.phys_dim},
                     {"right", m.bond_right(i)}});
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    for (const cx& z : m.sites[i].data()) {
      const double re = static_cast<double>(z.real());
      const double im = static_cast<double>(z.imag());
      f.write(reinterpret_cast<const char*>(&re), sizeof(double));
      f.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
    if (!f) throw std::runtime_error("save_mps: write failed");
  }
  manifest["sites"] = std::move(sites);
  std::ofstream mf(fs::path(dir) / "manifest.json");
  mf << manifest.dump(2) << "\n";
  if (!mf) throw std::runtime_error("save_mps: manifest write failed");
}

Mps load_mps(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw std::runtime_error("load_mps: missing manifest.json");
  nlohmann::json manifest = nlohmann::json::parse(mf);
  if (manifest.at("format_version").get<int>() != 1)
    throw std::runtime_error("load_mps: unsupported format version");
  if (manifest.at("scalar").get<std::string>() != "complex128" ||
      manifest.at("endianness").get<std::string>() != "little")
    throw std::runtime_error("load_mps: unsupported scalar encoding");
  Mps m;
  m.phys_dim = manifest.at("phys_dim").get<std::size_t>();
  const std::string bnd = manifest.at("boundary").get<std::string>();
  if (bnd == "open")
    m.boundary = Boundary::open;
  else if (bnd == "periodic")
    m.boundary = Boundary::periodic;
  else
    throw std::runtime_error("load_mps: bad boundary");
  const auto& sites = manifest.at("sites");
  if (sites.size() != manifest.at("L").get<std::size_t>())
    throw std::runtime_error("load_mps: site count mismatch");
  for (const auto& s : sites) {
    const std::size_t dl = s.at("left").get<std::size_t>();
    const std::size_t p = s.at("phys").get<std::size_t>();
    const std::size_t dr = s.at("right").get<std::size_t>();
    std::ifstream f(fs::path(dir) / s.at("file").get<std::string>(),
                    std::ios::binary);
    if (!f) throw std::runtime_error("load_mps: missing site file");
    std::vector<cx> data(dl * p * dr);
    for (cx& z : data) {
      double re = 0.0, im = 0.0;
      f.read(reinterpret_cast<char*>(&re), sizeof(double));
      f.read(reinterpret_cast<char*>(&im), sizeof(double));
      z = cx(static_cast<real_t>(re), static_cast<real_t>(im));
    }
    if (!f) throw std::runtime_error("load_mps: short site file");
    if (f.peek() != std::char_traits<char>::eof())
      throw std::runtime_error("load_mps: trailing bytes in site file");
    m.sites.push_back(Tensor({{"l", dl}, {"p", p}, {"r", dr}}, std::move(data)));
  }
  m.validate();
  return m;
}

}  // namespace tnspec
