#include "tnspec/physics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "tnspec/kernels.hpp"
#include "tnspec/slq.hpp"

namespace tnspec {

namespace {

constexpr cx kI{0.0, 1.0};

// Pauli matrices, row-major
const cx kSx[4] = {0.0, 1.0, 1.0, 0.0};
const cx kSy[4] = {0.0, -kI, kI, 0.0};
const cx kSz[4] = {1.0, 0.0, 0.0, -1.0};
const cx kId[4] = {1.0, 0.0, 0.0, 1.0};

}  // namespace

HeisenbergOp::HeisenbergOp(const HeisenbergModel& model) : model_(model) {
  if (model.length < 2) throw std::invalid_argument("Heisenberg: L >= 2");
  if (model.length > 24) throw std::invalid_argument("Heisenberg: L over cap");
  dim_ = std::size_t{1} << model.length;
}

void HeisenbergOp::apply(const cx* in, cx* out) const {
  const std::size_t L = model_.length;
  const real_t j = static_cast<real_t>(model_.j);
  std::fill(out, out + dim_, cx{});
  for (std::size_t bond = 0; bond + 1 < L; ++bond) {
    // site 0 is the most significant bit
    const std::size_t hi = L - 1 - bond, lo = L - 2 - bond;
    const std::size_t mask = (std::size_t{1} << hi) | (std::size_t{1} << lo);
    for (std::size_t s = 0; s < dim_; ++s) {
      const bool a = (s >> hi) & 1, b = (s >> lo) & 1;
      if (a == b) {
        out[s] += j * in[s];  // sigma^z sigma^z parallel
      } else {
        out[s] -= j * in[s];
        out[s ^ mask] += real_t(2) * j * in[s];  // (xx + yy) spin flip
      }
    }
  }
}

void HeisenbergOp::apply_adjoint(const cx* in, cx* out) const {
  apply(in, out);  // real symmetric
}

Matrix heisenberg_dense(const HeisenbergModel& model) {
  HeisenbergOp op(model);
  const std::size_t d = op.rows();
  if (d > 4096) throw std::invalid_argument("heisenberg_dense: L over dense cap");
  Matrix h(d, d);
  std::vector<cx> e(d), col(d);
  for (std::size_t jcol = 0; jcol < d; ++jcol) {
    std::fill(e.begin(), e.end(), cx{});
    e[jcol] = 1.0;
    op.apply(e.data(), col.data());
    for (std::size_t i = 0; i < d; ++i) h(i, jcol) = col[i];
  }
  return h;
}

Mpo heisenberg_mpo(const HeisenbergModel& model) {
  const std::size_t L = model.length;
  if (L < 2) throw std::invalid_argument("heisenberg_mpo: L >= 2");
  const real_t j = static_cast<real_t>(model.j);
  // bulk transfer: W[0,0]=I; W[1..3,0]=sx,sy,sz; W[4,1..3]=J*(sx,sy,sz); W[4,4]=I
  auto bulk = [&](std::size_t wl, std::size_t wr, std::size_t pu,
                  std::size_t pd) -> cx {
    const std::size_t pp = pu * 2 + pd;
    if (wl == 0 && wr == 0) return kId[pp];
    if (wr == 0 && wl >= 1 && wl <= 3)
      return (wl == 1 ? kSx : wl == 2 ? kSy : kSz)[pp];
    if (wl == 4 && wr >= 1 && wr <= 3)
      return j * (wr == 1 ? kSx : wr == 2 ? kSy : kSz)[pp];
    if (wl == 4 && wr == 4) return kId[pp];
    return cx{};
  };
  Mpo mpo;
  mpo.phys_dim = 2;
  for (std::size_t i = 0; i < L; ++i) {
    const std::size_t dl = (i == 0) ? 1 : 5;
    const std::size_t dr = (i + 1 == L) ? 1 : 5;
    std::vector<cx> data(dl * 2 * 2 * dr);
    for (std::size_t wl = 0; wl < dl; ++wl)
      for (std::size_t pu = 0; pu < 2; ++pu)
        for (std::size_t pd = 0; pd < 2; ++pd)
          for (std::size_t wr = 0; wr < dr; ++wr) {
            const std::size_t wl_eff = (i == 0) ? 4 : wl;  // left boundary row
            const std::size_t wr_eff = (i + 1 == L) ? 0 : wr;  // right col
            data[((wl * 2 + pu) * 2 + pd) * dr + wr] =
                bulk(wl_eff, wr_eff, pu, pd);
          }
    mpo.sites.push_back(Tensor(
        {{"l", dl}, {"pu", 2}, {"pd", 2}, {"r", dr}}, std::move(data)));
  }
  return mpo;
}

Matrix mpo_dense(const Mpo& mpo) {
  const std::size_t L = mpo.length(), p = mpo.phys_dim;
  std::size_t d = 1;
  for (std::size_t i = 0; i < L; ++i) {
    d *= p;
    if (d > 2048) throw std::invalid_argument("mpo_dense: over cap");
  }
  // blocks[w] is the accumulated (d_k x d_k) operator for mpo bond value w
  std::vector<Matrix> blocks(1, Matrix(1, 1));
  blocks[0](0, 0) = 1.0;
  std::size_t dk = 1;
  for (std::size_t i = 0; i < L; ++i) {
    const Tensor& w = mpo.sites[i];
    const std::size_t dl = w.indices()[0].dim, dr = w.indices()[3].dim;
    std::vector<Matrix> next(dr, Matrix(dk * p, dk * p));
    for (std::size_t wr = 0; wr < dr; ++wr)
      for (std::size_t wl = 0; wl < dl; ++wl)
        for (std::size_t pu = 0; pu < p; ++pu)
          for (std::size_t pd = 0; pd < p; ++pd) {
            const cx wv =
                w.data()[((wl * p + pu) * p + pd) * dr + wr];
            if (wv == cx{}) continue;
            for (std::size_t ro = 0; ro < dk; ++ro)
              for (std::size_t ri = 0; ri < dk; ++ri)
                next[wr](ro * p + pu, ri * p + pd) +=
                    blocks[wl](ro, ri) * wv;
          }
    blocks = std::move(next);
    dk *= p;
  }
  return blocks[0];
}

PureState neel_state(std::size_t length) {
  if (length == 0) throw std::invalid_argument("neel_state: empty chain");
  std::vector<Index> idx;
  for (std::size_t i = 0; i < length; ++i)
    idx.push_back({"s" + std::to_string(i), 2});
  std::size_t basis = 0;  // |up down up down ...>, up = bit 0
  for (std::size_t i = 0; i < length; ++i)
    if (i % 2 == 1) basis |= std::size_t{1} << (length - 1 - i);
  std::vector<cx> amps(std::size_t{1} << length, cx{});
  amps[basis] = 1.0;
  PureState psi;
  psi.tensor = Tensor(std::move(idx), std::move(amps));
  psi.num_sites = length;
  psi.phys_dim = 2;
  return psi;
}

namespace {

// v <- exp(-i H dt) v within a Krylov subspace; halves dt on large residual.
void krylov_substep(const LinOp& h, std::vector<cx>& v, double dt,
                    std::size_t kdim, int depth) {
  if (depth > 24) throw std::runtime_error("evolve: step size underflow");
  LanczosState st = lanczos_init(v);
  const double b1 = st.beta[0];
  const std::size_t cap = std::min(kdim, v.size());
  while (st.k() < cap && !st.invariant_subspace) lanczos_step(h, st);
  const std::size_t k = st.k();
  TridiagEigFull e = eig_sym_tridiagonal_full(st.tridiagonal());
  std::vector<cx> c(k, cx{});
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t j = 0; j < k; ++j)
      c[m] += static_cast<real_t>(e.vectors[m * k + j]) *
              std::exp(-kI * static_cast<real_t>(e.theta[j] * dt)) *
              static_cast<real_t>(e.vectors[j]);  // row 0 of the eigenbasis
  const double resid =
      (!st.invariant_subspace && k > 1) ? std::abs(c[k - 1]) : 0.0;
  if (resid > 1e-10) {
    krylov_substep(h, v, dt / 2, kdim, depth + 1);
    krylov_substep(h, v, dt / 2, kdim, depth + 1);
    return;
  }
  std::vector<cx> out(v.size(), cx{});
  for (std::size_t m = 0; m < k; ++m)
    axpy(c[m] * static_cast<real_t>(b1), st.basis[m].data(), out.data(),
         out.size());
  v = std::move(out);
}

}  // namespace

std::vector<QuenchStep> evolve(const PureState& psi,
                               const HeisenbergModel& model,
                               const QuenchConfig& cfg) {
  if (cfg.dt <= 0.0) throw std::invalid_argument("evolve: dt must be positive");
  if (psi.num_sites != model.length)
    throw std::invalid_argument("evolve: state/model length mismatch");
  HeisenbergOp h(model);
  std::vector<cx> v = psi.tensor.data();
  std::vector<QuenchStep> series;
  auto snapshot = [&](double t) {
    PureState s;
    s.tensor = Tensor(psi.tensor.indices(), v);
    s.num_sites = psi.num_sites;
    s.phys_dim = psi.phys_dim;
    series.push_back({t, std::move(s)});
  };
  snapshot(0.0);
  const std::size_t steps =
      static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
  for (std::size_t n = 1; n <= steps; ++n) {
    krylov_substep(h, v, cfg.dt, cfg.krylov_dim, 0);
    snapshot(n * cfg.dt);
  }
  return series;
}

namespace {

// env tensors carry labels ("eb", "ew", "ek") = (bra, mpo, ket bond)
Tensor env_boundary() {
  return Tensor({{"eb", 1}, {"ew", 1}, {"ek", 1}}, {cx{1.0}});
}

Tensor update_left(const Tensor& env, const Tensor& site, const Tensor& w) {
  Tensor ket = relabel(site, {{"l", "cl"}, {"p", "cp"}, {"r", "ek2"}});
  Tensor t = contract_pair(relabel(env, {{"ek", "cl"}}), ket);
  Tensor wt = relabel(w, {{"l", "ew"}, {"pu", "bp"}, {"pd", "cp"}, {"r", "ew2"}});
  t = contract_pair(t, wt);
  Tensor bra = conjugate(relabel(site, {{"l", "eb"}, {"p", "bp"}, {"r", "eb2"}}));
  t = contract_pair(t, bra);
  return relabel(t.permuted({"eb2", "ew2", "ek2"}),
                 {{"eb2", "eb"}, {"ew2", "ew"}, {"ek2", "ek"}});
}

Tensor update_right(const Tensor& env, const Tensor& site, const Tensor& w) {
  Tensor ket = relabel(site, {{"l", "ek2"}, {"p", "cp"}, {"r", "cr"}});
  Tensor t = contract_pair(relabel(env, {{"ek", "cr"}}), ket);
  Tensor wt = relabel(w, {{"l", "ew2"}, {"pu", "bp"}, {"pd", "cp"}, {"r", "ew"}});
  t = contract_pair(t, wt);
  Tensor bra = conjugate(relabel(site, {{"l", "eb2"}, {"p", "bp"}, {"r", "eb"}}));
  t = contract_pair(t, bra);
  return relabel(t.permuted({"eb2", "ew2", "ek2"}),
                 {{"eb2", "eb"}, {"ew2", "ew"}, {"ek2", "ek"}});
}

TnOperator two_site_op(const Tensor& lenv, const Tensor& w1, const Tensor& w2,
                       const Tensor& renv) {
  TensorNetwork net;
  net.tensors.push_back(
      relabel(lenv, {{"eb", "lout"}, {"ew", "wl"}, {"ek", "lin"}}));
  net.tensors.push_back(
      relabel(w1, {{"l", "wl"}, {"pu", "p1o"}, {"pd", "p1i"}, {"r", "wm"}}));
  net.tensors.push_back(
      relabel(w2, {{"l", "wm"}, {"pu", "p2o"}, {"pd", "p2i"}, {"r", "wr"}}));
  net.tensors.push_back(
      relabel(renv, {{"eb", "rout"}, {"ew", "wr"}, {"ek", "rin"}}));
  return TnOperator(std::move(net), {"lout", "p1o", "p2o", "rout"},
                    {"lin", "p1i", "p2i", "rin"});
}

struct GroundResult {
  double energy = 0.0;
  std::vector<cx> vec;
};

GroundResult lanczos_ground(const LinOp& op, std::vector<cx> init,
                            std::size_t k_cap) {
  LanczosState st = lanczos_init(std::move(init));
  TridiagEigFull e;
  for (;;) {
    lanczos_step(op, st);
    e = eig_sym_tridiagonal_full(st.tridiagonal());
    const std::size_t k = st.k();
    const double resid = st.invariant_subspace
                             ? 0.0
                             : st.beta[k] * std::abs(e.vectors[(k - 1) * k]);
    if (resid < 1e-9 * std::max(1.0, std::abs(e.theta[0]))) break;
    if (k >= k_cap || st.invariant_subspace) break;
  }
  const std::size_t k = st.k();
  GroundResult g;
  g.energy = e.theta[0];
  g.vec.assign(st.basis[0].size(), cx{});
  for (std::size_t m = 0; m < k; ++m)
    axpy(cx(static_cast<real_t>(e.vectors[m * k]), 0.0), st.basis[m].data(),
         g.vec.data(), g.vec.size());
  return g;
}

// Truncated SVD split of a two-site tensor via the Gram matrix on the
// smaller side (plenty accurate at DMRG cutoffs, much faster than Jacobi).
void split_theta(const Matrix& m, double cutoff, std::size_t chi_max,
                 Matrix& u, std::vector<double>& s, Matrix& vh) {
  const bool rows_small = m.rows <= m.cols;
  Matrix g = rows_small ? matmul(m, m.adjoint()) : matmul(m.adjoint(), m);
  HermEig eig = eig_hermitian_dense(g, true);
  const std::size_t n = g.rows;
  const double lmax = std::max(eig.values.back(), 0.0);
  // Gram eigenvalues below ~n*eps*lmax are numerical noise; keeping such
  // directions puts non-orthonormal rows into the canonical form (the 1/s
  // scaling amplifies the noise), which corrupts the environments.
  const double noise = 4.0 * static_cast<double>(n) * 2.3e-16 * lmax;
  const double thresh = std::max(cutoff * cutoff * lmax, noise);
  std::size_t keep = 0;
  while (keep < std::min(chi_max, n) && eig.values[n - 1 - keep] > thresh)
    ++keep;
  if (keep == 0) keep = 1;
  s.resize(keep);
  Matrix vecs(n, keep);
  for (std::size_t jj = 0; jj < keep; ++jj) {
    s[jj] = std::sqrt(std::max(eig.values[n - 1 - jj], 0.0));
    for (std::size_t i = 0; i < n; ++i) vecs(i, jj) = eig.vectors(i, n - 1 - jj);
  }
  if (rows_small) {
    u = std::move(vecs);
    Matrix uhm = matmul(u.adjoint(), m);
    vh = Matrix(keep, m.cols);
    for (std::size_t jj = 0; jj < keep; ++jj) {
      const real_t inv =
          static_cast<real_t>(s[jj] > 0.0 ? 1.0 / s[jj] : 0.0);
      for (std::size_t i = 0; i < m.cols; ++i) vh(jj, i) = uhm(jj, i) * inv;
    }
    // Restore exact row orthonormality lost to the 1/s amplification.
    Matrix lfac, q;
    lq(vh, lfac, q);
    vh = std::move(q);
  } else {
    vh = vecs.adjoint();
    Matrix mv = matmul(m, vecs);
    u = Matrix(m.rows, keep);
    for (std::size_t jj = 0; jj < keep; ++jj) {
      const real_t inv =
          static_cast<real_t>(s[jj] > 0.0 ? 1.0 / s[jj] : 0.0);
      for (std::size_t i = 0; i < m.rows; ++i) u(i, jj) = mv(i, jj) * inv;
    }
    Matrix q, rfac;
    qr(u, q, rfac);
    u = std::move(q);
  }
}

}  // namespace

DmrgResult dmrg2(const Mpo& mpo, const DmrgConfig& cfg, std::uint64_t seed) {
  if (cfg.chi_max < 2) throw std::invalid_argument("dmrg2: chi_max >= 2");
  const std::size_t L = mpo.length(), p = mpo.phys_dim;
  if (L < 2) throw std::invalid_argument("dmrg2: chain too short");
  Mps m = random_mps(L, p, std::min<std::size_t>(8, cfg.chi_max), seed);

  std::vector<std::vector<cx>> site(L);
  std::vector<std::size_t> dl(L), dr(L);
  for (std::size_t i = 0; i < L; ++i) {
    site[i] = m.sites[i].data();
    dl[i] = m.bond_left(i);
    dr[i] = m.bond_right(i);
  }
  auto site_tensor = [&](std::size_t i) {
    return Tensor({{"l", dl[i]}, {"p", p}, {"r", dr[i]}}, site[i]);
  };

  std::vector<Tensor> lenv(L), renv(L);
  lenv[0] = env_boundary();
  renv[L - 1] = env_boundary();
  for (std::size_t i = L - 1; i > 0; --i)
    renv[i - 1] = update_right(renv[i], site_tensor(i), mpo.sites[i]);

  DmrgResult out;
  double energy = 0.0;
  bool have_energy = false;

  std::size_t chi_sweep = cfg.chi_max;
  std::size_t k_cap = 24;
  auto optimize = [&](std::size_t i, bool moving_right) {
    const std::size_t rows = dl[i] * p, cols = p * dr[i + 1];
    std::vector<cx> theta(rows * cols);
    gemm(site[i].data(), site[i + 1].data(), theta.data(), rows, dr[i], cols);
    TnOperator op = two_site_op(lenv[i], mpo.sites[i], mpo.sites[i + 1],
                                renv[i + 1]);
    GroundResult g = lanczos_ground(
        op, std::move(theta), std::min<std::size_t>(k_cap, rows * cols));
    Matrix mth(rows, cols);
    mth.data = std::move(g.vec);
    Matrix u, vh;
    std::vector<double> s;
    split_theta(mth, cfg.cutoff, chi_sweep, u, s, vh);
    const std::size_t k = s.size();
    double ns = 0.0;
    for (double x : s) ns += x * x;
    ns = std::sqrt(ns);
    dr[i] = k;
    dl[i + 1] = k;
    if (moving_right) {
      site[i] = std::move(u.data);
      site[i + 1].assign(k * cols, cx{});
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < cols; ++b)
          site[i + 1][a * cols + b] =
              vh(a, b) * static_cast<real_t>(s[a] / ns);
    } else {
      site[i + 1] = std::move(vh.data);
      site[i].assign(rows * k, cx{});
      for (std::size_t a = 0; a < rows; ++a)
        for (std::size_t b = 0; b < k; ++b)
          site[i][a * k + b] = u(a, b) * static_cast<real_t>(s[b] / ns);
    }
    return g.energy;
  };

  for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    // Ramp the bond dimension up over the first sweeps: a random start has
    // no Schmidt decay, so full-chi early sweeps cost chi^3 for nothing.
    chi_sweep = std::min(cfg.chi_max, std::size_t{16} << std::min<std::size_t>(sweep, 16));
    // Warm-started bond problems need only a few Krylov steps after sweep 0.
    k_cap = sweep == 0 ? 24 : 8;
    double e_last = 0.0;
    for (std::size_t i = 0; i + 1 < L; ++i) {
      e_last = optimize(i, true);
      if (i + 2 < L)
        lenv[i + 1] = update_left(lenv[i], site_tensor(i), mpo.sites[i]);
    }
    for (std::size_t i = L - 1; i > 0; --i) {
      e_last = optimize(i - 1, false);
      if (i > 1)
        renv[i - 1] = update_right(renv[i], site_tensor(i), mpo.sites[i]);
    }
    out.sweep_energies.push_back(e_last);
    out.sweeps = sweep + 1;
    if (std::getenv("TNSPEC_DMRG_TRACE")) {
      static auto start = std::chrono::steady_clock::now();
      std::fprintf(stderr, "dmrg sweep %zu chi %zu E %.10f t %.1fs\n", sweep,
                   chi_sweep, e_last,
                   std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count());
    }
    if (have_energy && chi_sweep >= cfg.chi_max &&
        std::abs(e_last - energy) < cfg.tol * std::max(1.0, std::abs(e_last))) {
      energy = e_last;
      out.converged = true;
      break;
    }
    energy = e_last;
    have_energy = chi_sweep >= cfg.chi_max;
  }
  out.energy = energy;

  Mps res;
  res.boundary = Boundary::open;
  res.phys_dim = p;
  for (std::size_t i = 0; i < L; ++i)
    res.sites.push_back(
        Tensor({{"l", dl[i]}, {"p", p}, {"r", dr[i]}}, std::move(site[i])));
  out.mps = canonicalize(res, 0);
  return out;
}

CftFit cft_fit(const std::vector<std::pair<double, double>>& points,
               std::size_t l_total) {
  std::vector<double> xs, ys;
  for (const auto& [lab, e] : points) {
    if (lab <= 0.5 * static_cast<double>(l_total)) {
      xs.push_back(std::log2(lab / 4.0));
      ys.push_back(e);
    }
  }
  const std::size_t n = xs.size();
  if (n < 4) throw std::invalid_argument("cft_fit: fewer than 4 admissible points");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (slope * xs[i] + intercept);
    ssr += r * r;
  }
  const double sigma2 = (n > 2) ? ssr / (n - 2) : 0.0;
  CftFit fit;
  fit.c = 4.0 * slope;
  fit.c_err = 4.0 * std::sqrt(sigma2 / sxx);
  fit.k_const = intercept;
  fit.k_err = std::sqrt(sigma2 * (1.0 / n + mx * mx / sxx));
  return fit;
}

}  // namespace tnspec
