#include "tnspec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "tnspec/kernels.hpp"

namespace tnspec {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = cx{1.0, 0.0};
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix r(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

double Matrix::frob_norm() const { return nrm2(data.data(), data.size()); }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul shape mismatch");
  Matrix c(a.rows, b.cols);
  gemm(a.data.data(), b.data.data(), c.data.data(), a.rows, a.cols, b.cols);
  return c;
}

void DenseOp::apply(const cx* in, cx* out) const {
  gemm(m_.data.data(), in, out, m_.rows, m_.cols, 1);
}

void DenseOp::apply_adjoint(const cx* in, cx* out) const {
  // out_j = sum_i conj(m_ij) in_i
  std::fill(out, out + m_.cols, cx{0.0, 0.0});
  for (std::size_t i = 0; i < m_.rows; ++i) {
    const cx v = in[i];
    const cx* row = m_.data.data() + i * m_.cols;
    for (std::size_t j = 0; j < m_.cols; ++j) out[j] += std::conj(row[j]) * v;
  }
}

// ---------------------------------------------------------------------------
// Implicit-shift QL on a symmetric tridiagonal, with a rotation callback so
// the same core serves first-component tracking, full real eigenvectors and
// complex Householder bases.
// ---------------------------------------------------------------------------
namespace {

void ql_implicit(std::vector<double>& d, std::vector<double>& e,
                 const std::function<void(std::size_t, std::size_t, double,
                                          double)>& rotate) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e.resize(n, 0.0);  // e[n-1] is workspace
  // Absolute split floor: relative-to-neighbours alone never fires on
  // near-zero diagonal blocks (degenerate density-matrix spectra).
  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    anorm = std::max(anorm, std::abs(d[i]) + 2.0 * std::abs(e[i]));
  const double floor_abs = std::max(1e-300, 2.3e-16 * anorm);
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= floor_abs || std::abs(e[m]) <= 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw std::runtime_error("tridiagonal QL failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          rotate(i, i + 1, c, s);
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

TridiagEig eig_sym_tridiagonal(const TridiagonalMatrix& t) {
  const std::size_t n = t.alpha.size();
  if (t.beta.size() + 1 != n && !(n == 0 && t.beta.empty()))
    throw std::invalid_argument("tridiagonal alpha/beta length mismatch");
  std::vector<double> d = t.alpha, e = t.beta;
  std::vector<double> first(n, 0.0);
  if (n > 0) first[0] = 1.0;
  ql_implicit(d, e, [&](std::size_t i, std::size_t j, double c, double s) {
    const double f = first[j];
    first[j] = s * first[i] + c * f;
    first[i] = c * first[i] - s * f;
  });
  std::vector<std::size_t> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(),
            [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  TridiagEig out;
  out.theta.resize(n);
  out.tau.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.theta[k] = d[ord[k]];
    out.tau[k] = first[ord[k]];
  }
  return out;
}

TridiagEigFull eig_sym_tridiagonal_full(const TridiagonalMatrix& t) {
  const std::size_t n = t.alpha.size();
  std::vector<double> d = t.alpha, e = t.beta;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  ql_implicit(d, e, [&](std::size_t i, std::size_t j, double c, double s) {
    for (std::size_t k = 0; k < n; ++k) {
      const double f = v[k * n + j];
      v[k * n + j] = s * v[k * n + i] + c * f;
      v[k * n + i] = c * v[k * n + i] - s * f;
    }
  });
  std::vector<std::size_t> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(),
            [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  TridiagEigFull out;
  out.theta.resize(n);
  out.vectors.assign(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    out.theta[k] = d[ord[k]];
    for (std::size_t r = 0; r < n; ++r) out.vectors[r * n + k] = v[r * n + ord[k]];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dense Hermitian eigensolver: Householder reduction to real tridiagonal
// form, then QL with the rotations applied to the accumulated basis.
// ---------------------------------------------------------------------------
namespace {

void check_hermitian(const Matrix& m, double tol) {
  if (m.rows != m.cols) throw std::invalid_argument("matrix not square");
  double mx = 0.0, asym = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = i; j < m.cols; ++j) {
      mx = std::max(mx, std::abs(m(i, j)));
      asym = std::max(asym, std::abs(m(i, j) - std::conj(m(j, i))));
    }
  if (asym > tol * std::max(1.0, mx))
    throw std::invalid_argument("matrix is not Hermitian");
}

// Elementary reflector generation (zlarfg): on return alpha -> beta (real),
// x holds v (without the implicit leading 1), tau the reflector scale.
cx larfg(cx& alpha, cx* x, std::size_t n, double& beta_out) {
  double xnorm = nrm2(x, n);
  if (xnorm == 0.0 && alpha.imag() == 0.0) {
    beta_out = alpha.real();
    return cx{0.0, 0.0};
  }
  const double ar = alpha.real(), ai = alpha.imag();
  double beta = -std::copysign(std::sqrt(ar * ar + ai * ai + xnorm * xnorm), ar);
  const cx tau{(beta - ar) / beta, -ai / beta};
  const cx scale = cx{1.0, 0.0} / (alpha - beta);
  scal(scale, x, n);
  alpha = cx{beta, 0.0};
  beta_out = beta;
  return tau;
}

}  // namespace

HermEig eig_hermitian_dense(const Matrix& m_in, bool want_vectors) {
  check_hermitian(m_in, 1e-10);
  const std::size_t n = m_in.rows;
  HermEig out;
  if (n == 0) return out;

  Matrix a = m_in;
  std::vector<double> d(n), e(n > 1 ? n - 1 : 0, 0.0);
  std::vector<cx> taus(n > 1 ? n - 1 : 0);

  // Reduce to tridiagonal (lower-storage reflectors kept in a's columns).
  for (std::size_t i = 0; i + 1 < n; ++i) {
    cx alpha = a(i + 1, i);
    std::vector<cx> x(n - i - 2);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = a(i + 2 + k, i);
    double beta;
    const cx tau = larfg(alpha, x.data(), x.size(), beta);
    e[i] = beta;
    taus[i] = tau;
    // v (with v0 = 1) stored back in column i
    a(i + 1, i) = cx{1.0, 0.0};
    for (std::size_t k = 0; k < x.size(); ++k) a(i + 2 + k, i) = x[k];

    if (tau != cx{0.0, 0.0}) {
      const std::size_t sz = n - i - 1;
      // y = tau * A22 * v
      std::vector<cx> y(sz, cx{0.0, 0.0});
      for (std::size_t r = 0; r < sz; ++r) {
        cx acc{0.0, 0.0};
        for (std::size_t c = 0; c < sz; ++c)
          acc += a(i + 1 + r, i + 1 + c) * a(i + 1 + c, i);
        y[r] = tau * acc;
      }
      // w = y - (tau/2) (y^H v) v
      cx yv{0.0, 0.0};
      for (std::size_t r = 0; r < sz; ++r) yv += std::conj(y[r]) * a(i + 1 + r, i);
      const cx alpha_c = cx{-0.5, 0.0} * tau * yv;
      for (std::size_t r = 0; r < sz; ++r) y[r] += alpha_c * a(i + 1 + r, i);
      // A22 -= v w^H + w v^H
      for (std::size_t r = 0; r < sz; ++r) {
        const cx vr = a(i + 1 + r, i);
        const cx wr = y[r];
        for (std::size_t c = 0; c < sz; ++c) {
          a(i + 1 + r, i + 1 + c) -=
              vr * std::conj(y[c]) + wr * std::conj(a(i + 1 + c, i));
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i).real();

  Matrix q;
  if (want_vectors) {
    q = Matrix::identity(n);
    // Q = H(0) H(1) ... applied from the last reflector backwards.
    for (std::size_t i = n - 1; i-- > 0;) {
      if (taus[i] == cx{0.0, 0.0}) continue;
      const std::size_t sz = n - i - 1;
      // w^H = v^H Q   (over rows i+1..n-1)
      std::vector<cx> w(n, cx{0.0, 0.0});
      for (std::size_t r = 0; r < sz; ++r) {
        const cx vc = std::conj(a(i + 1 + r, i));
        const cx* qrow = q.data.data() + (i + 1 + r) * n;
        for (std::size_t c = 0; c < n; ++c) w[c] += vc * qrow[c];
      }
      for (std::size_t r = 0; r < sz; ++r) {
        const cx f = taus[i] * a(i + 1 + r, i);
        cx* qrow = q.data.data() + (i + 1 + r) * n;
        for (std::size_t c = 0; c < n; ++c) qrow[c] -= f * w[c];
      }
    }
  }

  std::vector<double> dd = d, ee = e;
  if (want_vectors) {
    ql_implicit(dd, ee, [&](std::size_t i, std::size_t j, double c, double s) {
      for (std::size_t k = 0; k < n; ++k) {
        const cx f = q(k, j);
        q(k, j) = s * q(k, i) + c * f;
        q(k, i) = c * q(k, i) - s * f;
      }
    });
  } else {
    ql_implicit(dd, ee, [](std::size_t, std::size_t, double, double) {});
  }

  std::vector<std::size_t> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(),
            [&](std::size_t x, std::size_t y) { return dd[x] < dd[y]; });
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = dd[ord[k]];
  if (want_vectors) {
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = q(r, ord[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD.
// ---------------------------------------------------------------------------
namespace {

// Work on a copy with rows >= cols; rotate column pairs until orthogonal.
SvdResult jacobi_svd_tall(const Matrix& m) {
  const std::size_t rows = m.rows, cols = m.cols;
  Matrix w = m;
  Matrix v = Matrix::identity(cols);

  for (const auto& x : w.data)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw std::invalid_argument("svd: non-finite entries");

  const double eps = 1e-14;
  bool converged = false;
  for (int sweep = 0; sweep < 60 && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double ap = 0.0, aq = 0.0;
        cx cpq{0.0, 0.0};
        for (std::size_t i = 0; i < rows; ++i) {
          const cx wp = w(i, p), wq = w(i, q);
          ap += std::norm(wp);
          aq += std::norm(wq);
          cpq += std::conj(wp) * wq;
        }
        const double off = std::abs(cpq);
        if (off <= eps * std::sqrt(ap * aq) || off == 0.0) continue;
        converged = false;
        const cx ph = cpq / off;
        const double tau = (aq - ap) / (2.0 * off);
        const double tt = std::copysign(1.0, tau) /
                          (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + tt * tt);
        const double s = tt * c;
        const cx phc = std::conj(ph);
        for (std::size_t i = 0; i < rows; ++i) {
          const cx wp = w(i, p);
          const cx wq = w(i, q) * phc;
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < cols; ++i) {
          const cx vp = v(i, p);
          const cx vq = v(i, q) * phc;
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
  }
  if (!converged) throw std::runtime_error("svd: Jacobi sweeps did not converge");

  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s2 = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s2 += std::norm(w(i, j));
    sv[j] = std::sqrt(s2);
  }
  std::vector<std::size_t> ord(cols);
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(),
                   [&](std::size_t a, std::size_t b) { return sv[a] > sv[b]; });

  SvdResult r;
  r.s.resize(cols);
  r.u = Matrix(rows, cols);
  r.vh = Matrix(cols, cols);
  const double smax = sv.empty() ? 0.0 : sv[ord[0]];
  for (std::size_t k = 0; k < cols; ++k) {
    const std::size_t j = ord[k];
    r.s[k] = sv[j];
    if (sv[j] > 1e-300 && sv[j] > 1e-16 * smax) {
      for (std::size_t i = 0; i < rows; ++i) r.u(i, k) = w(i, j) / sv[j];
    }
    for (std::size_t i = 0; i < cols; ++i) r.vh(k, i) = std::conj(v(i, j));
  }
  // Orthonormal completion for null columns of u.
  for (std::size_t k = 0; k < cols; ++k) {
    double nk = 0.0;
    for (std::size_t i = 0; i < rows; ++i) nk += std::norm(r.u(i, k));
    if (nk > 0.5) continue;
    for (std::size_t trial = 0; trial < rows; ++trial) {
      for (std::size_t i = 0; i < rows; ++i) r.u(i, k) = (i == trial) ? 1.0 : 0.0;
      for (std::size_t kk = 0; kk < cols; ++kk) {
        if (kk == k) continue;
        cx ov{0.0, 0.0};
        for (std::size_t i = 0; i < rows; ++i) ov += std::conj(r.u(i, kk)) * r.u(i, k);
        for (std::size_t i = 0; i < rows; ++i) r.u(i, k) -= ov * r.u(i, kk);
      }
      double nn = 0.0;
      for (std::size_t i = 0; i < rows; ++i) nn += std::norm(r.u(i, k));
      if (nn > 0.1) {
        const double inv = 1.0 / std::sqrt(nn);
        for (std::size_t i = 0; i < rows; ++i) r.u(i, k) *= inv;
        break;
      }
    }
  }
  return r;
}

}  // namespace

SvdResult svd(const Matrix& m) {
  if (m.rows >= m.cols) return jacobi_svd_tall(m);
  // A = U S Vh  <=>  A^H = V S U^H
  SvdResult t = jacobi_svd_tall(m.adjoint());
  SvdResult r;
  r.s = t.s;
  r.u = t.vh.adjoint();
  r.vh = t.u.adjoint();
  return r;
}

std::size_t orthonormalize_columns(Matrix& m) {
  const std::size_t rows = m.rows, cols = m.cols;
  std::size_t rank = 0;
  for (int pass = 0; pass < 2; ++pass) {
    rank = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        cx ov{0.0, 0.0};
        for (std::size_t i = 0; i < rows; ++i) ov += std::conj(m(i, k)) * m(i, j);
        for (std::size_t i = 0; i < rows; ++i) m(i, j) -= ov * m(i, k);
      }
      double nn = 0.0;
      for (std::size_t i = 0; i < rows; ++i) nn += std::norm(m(i, j));
      nn = std::sqrt(nn);
      if (nn > 1e-13) {
        const double inv = 1.0 / nn;
        for (std::size_t i = 0; i < rows; ++i) m(i, j) *= inv;
        ++rank;
      } else {
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = cx{0.0, 0.0};
      }
    }
  }
  return rank;
}

SvdResult truncated_svd(const LinOp& op, double cutoff, std::size_t rank_cap,
                        std::uint64_t seed) {
  const std::size_t rows = op.rows(), cols = op.cols();
  const std::size_t oversample = 10;
  const std::size_t l =
      std::min({rows, cols, rank_cap + oversample});
  if (l == 0) throw std::invalid_argument("truncated_svd: empty operator");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix q(rows, l);
  {
    std::vector<cx> omega(cols), y(rows);
    for (std::size_t j = 0; j < l; ++j) {
      for (auto& x : omega) x = cx(gauss(rng), gauss(rng));
      op.apply(omega.data(), y.data());
      for (std::size_t i = 0; i < rows; ++i) q(i, j) = y[i];
    }
  }
  orthonormalize_columns(q);
  // Two power iterations sharpen the range on slowly decaying spectra.
  for (int it = 0; it < 2; ++it) {
    Matrix z(cols, l);
    std::vector<cx> in(rows), out(cols);
    for (std::size_t j = 0; j < l; ++j) {
      for (std::size_t i = 0; i < rows; ++i) in[i] = q(i, j);
      op.apply_adjoint(in.data(), out.data());
      for (std::size_t i = 0; i < cols; ++i) z(i, j) = out[i];
    }
    orthonormalize_columns(z);
    std::vector<cx> in2(cols), out2(rows);
    for (std::size_t j = 0; j < l; ++j) {
      for (std::size_t i = 0; i < cols; ++i) in2[i] = z(i, j);
      op.apply(in2.data(), out2.data());
      for (std::size_t i = 0; i < rows; ++i) q(i, j) = out2[i];
    }
    orthonormalize_columns(q);
  }

  // B = Q^H A, via B^H = A^H Q.
  Matrix bh(cols, l);
  {
    std::vector<cx> in(rows), out(cols);
    for (std::size_t j = 0; j < l; ++j) {
      for (std::size_t i = 0; i < rows; ++i) in[i] = q(i, j);
      op.apply_adjoint(in.data(), out.data());
      for (std::size_t i = 0; i < cols; ++i) bh(i, j) = out[i];
    }
  }
  Matrix b(l, cols);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < cols; ++j) b(i, j) = std::conj(bh(j, i));

  SvdResult bs;
  if (l <= 96) {
    bs = svd(b);
  } else {
    // Large sketch: Jacobi is too slow, get s and U from the small Gram
    // b b^H instead (costs sqrt(eps) accuracy in the deep tail only).
    Matrix g = matmul(b, b.adjoint());
    HermEig eig = eig_hermitian_dense(g, true);
    bs.u = Matrix(l, l);
    bs.s.resize(l);
    bs.vh = Matrix(l, cols);
    for (std::size_t j = 0; j < l; ++j) {
      const std::size_t src = l - 1 - j;  // descending
      const double s = std::sqrt(std::max(eig.values[src], 0.0));
      bs.s[j] = s;
      for (std::size_t i = 0; i < l; ++i) bs.u(i, j) = eig.vectors(i, src);
    }
    Matrix uhb = matmul(bs.u.adjoint(), b);
    for (std::size_t j = 0; j < l; ++j) {
      const double inv = bs.s[j] > 0.0 ? 1.0 / bs.s[j] : 0.0;
      for (std::size_t i = 0; i < cols; ++i) bs.vh(j, i) = uhb(j, i) * inv;
    }
  }
  const double smax = bs.s.empty() ? 0.0 : bs.s[0];
  std::size_t keep = 0;
  while (keep < bs.s.size() && keep < rank_cap && bs.s[keep] >= cutoff * smax &&
         bs.s[keep] > 0.0)
    ++keep;
  if (keep == 0 && !bs.s.empty()) keep = 1;

  SvdResult r;
  r.rank_cap_hit =
      (keep == rank_cap && keep < bs.s.size() && bs.s[keep] > cutoff * smax);
  r.s.assign(bs.s.begin(), bs.s.begin() + keep);
  // u = Q * Ub[:, :keep]
  {
    Matrix ub(l, keep);
    for (std::size_t i = 0; i < l; ++i)
      for (std::size_t j = 0; j < keep; ++j) ub(i, j) = bs.u(i, j);
    Matrix u = matmul(q, ub);
    r.u = std::move(u);
  }
  r.vh = Matrix(keep, cols);
  for (std::size_t i = 0; i < keep; ++i)
    for (std::size_t j = 0; j < cols; ++j) r.vh(i, j) = bs.vh(i, j);
  return r;
}

// ---------------------------------------------------------------------------
// Cholesky.
// ---------------------------------------------------------------------------
namespace {

bool try_cholesky(const Matrix& m, double shift, Matrix& l_out) {
  const std::size_t n = m.rows;
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double djj = m(j, j).real() + shift;
    for (std::size_t k = 0; k < j; ++k) djj -= std::norm(l(j, k));
    if (djj <= 0.0 || !std::isfinite(djj)) return false;
    const double ljj = std::sqrt(djj);
    l(j, j) = cx{ljj, 0.0};
    for (std::size_t i = j + 1; i < n; ++i) {
      cx acc = m(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
      l(i, j) = acc / ljj;
    }
  }
  l_out = std::move(l);
  return true;
}

}  // namespace

CholResult cholesky_psd(const Matrix& m, double jitter) {
  check_hermitian(m, 1e-8);
  const std::size_t n = m.rows;
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) tr += m(i, i).real();

  CholResult res;
  if (try_cholesky(m, 0.0, res.factor)) {
    res.path = CholPath::plain;
    return res;
  }
  for (double j = jitter; j <= 1.0000001e-10; j *= 100.0) {
    const double shift = j * tr / static_cast<double>(n);
    if (try_cholesky(m, shift, res.factor)) {
      res.path = CholPath::jitter;
      return res;
    }
  }
  // Eigendecomposition square root, clamping negative eigenvalues.
  HermEig eig = eig_hermitian_dense(m);
  res.factor = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lam = std::max(eig.values[j], 0.0);
    const double sq = std::sqrt(lam);
    for (std::size_t i = 0; i < n; ++i) res.factor(i, j) = eig.vectors(i, j) * sq;
  }
  res.path = CholPath::eigen_fallback;
  return res;
}

PivotedPsdResult pivoted_psd_factor(
    std::size_t n, const std::vector<double>& diag,
    const std::function<void(std::size_t, cx*)>& column, double rel_tol,
    std::size_t rank_cap) {
  std::vector<double> d = diag;
  const double dmax0 =
      d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
  const double tol = rel_tol * dmax0;

  std::vector<std::vector<cx>> cols;  // factor columns, length n each
  std::vector<std::size_t> pivots;
  std::vector<cx> work(n);

  while (cols.size() < rank_cap) {
    std::size_t j = 0;
    double dj = -1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (d[i] > dj) { dj = d[i]; j = i; }
    if (dj <= tol || dj <= 0.0) break;

    column(j, work.data());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const cx f = std::conj(cols[k][j]);
      const cx* ck = cols[k].data();
      for (std::size_t i = 0; i < n; ++i) work[i] -= ck[i] * f;
    }
    const double pr = std::max(work[j].real(), 0.0);
    if (pr <= 0.0) break;
    const double piv = std::sqrt(pr);
    const double inv = 1.0 / piv;
    for (std::size_t i = 0; i < n; ++i) work[i] *= inv;
    work[j] = cx{piv, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      d[i] -= std::norm(work[i]);
      if (d[i] < 0.0) d[i] = 0.0;
    }
    d[j] = 0.0;
    cols.push_back(work);
    pivots.push_back(j);
  }

  PivotedPsdResult out;
  out.pivots = std::move(pivots);
  out.residual = std::accumulate(d.begin(), d.end(), 0.0);
  out.factor = Matrix(n, cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k)
    for (std::size_t i = 0; i < n; ++i) out.factor(i, k) = cols[k][i];
  return out;
}

void qr(const Matrix& a, Matrix& q, Matrix& r) {
  const std::size_t m = a.rows, n = a.cols, k = std::min(m, n);
  q = Matrix(m, k);
  r = Matrix(k, n);
  std::mt19937_64 rng(0x9d2c5680);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cx> v(m);
  for (std::size_t j = 0; j < n; ++j) {
    double col_norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = a(i, j);
      col_norm += std::norm(v[i]);
    }
    col_norm = std::sqrt(col_norm);
    const std::size_t lim = std::min(j, k);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t t = 0; t < lim; ++t) {
        cx h = 0.0;
        for (std::size_t i = 0; i < m; ++i) h += std::conj(q(i, t)) * v[i];
        r(t, j) += h;
        for (std::size_t i = 0; i < m; ++i) v[i] -= h * q(i, t);
      }
    if (j >= k) continue;  // wide matrix: remaining columns only fill r
    double nv = 0.0;
    for (std::size_t i = 0; i < m; ++i) nv += std::norm(v[i]);
    nv = std::sqrt(nv);
    if (nv > 1e-14 * std::max(col_norm, 1e-300)) {
      r(j, j) = nv;
      for (std::size_t i = 0; i < m; ++i) q(i, j) = v[i] / nv;
    } else {
      // deficient column: orthonormal filler keeps q a full isometry
      r(j, j) = 0.0;
      for (;;) {
        for (std::size_t i = 0; i < m; ++i)
          v[i] = cx(static_cast<real_t>(gauss(rng)),
                    static_cast<real_t>(gauss(rng)));
        for (int pass = 0; pass < 2; ++pass)
          for (std::size_t t = 0; t < j; ++t) {
            cx h = 0.0;
            for (std::size_t i = 0; i < m; ++i) h += std::conj(q(i, t)) * v[i];
            for (std::size_t i = 0; i < m; ++i) v[i] -= h * q(i, t);
          }
        nv = 0.0;
        for (std::size_t i = 0; i < m; ++i) nv += std::norm(v[i]);
        nv = std::sqrt(nv);
        if (nv > 1e-6) break;
      }
      for (std::size_t i = 0; i < m; ++i) q(i, j) = v[i] / nv;
    }
  }
}

void lq(const Matrix& a, Matrix& l, Matrix& q) {
  Matrix qh, rh;
  qr(a.adjoint(), qh, rh);
  q = qh.adjoint();
  l = rh.adjoint();
}

}  // namespace tnspec
