#include "tnspec/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tnspec {

void gemm_ref(const cx* a, const cx* b, cx* c,
              std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
  if (!accumulate) std::fill(c, c + m * n, cx{0.0, 0.0});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const cx av = a[i * k + p];
      if (av == cx{0.0, 0.0}) continue;
      const cx* brow = b + p * n;
      cx* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

namespace {

// One row-block of C updated from a k-panel.  Works on raw doubles so the
// compiler can vectorize the interleaved re/im arithmetic.
inline void micro_rows(const cx* a, const cx* b, cx* c,
                       std::size_t i0, std::size_t i1,
                       std::size_t p0, std::size_t p1,
                       std::size_t k, std::size_t n) {
  for (std::size_t i = i0; i < i1; ++i) {
    real_t* cr = reinterpret_cast<real_t*>(c + i * n);
    for (std::size_t p = p0; p < p1; ++p) {
      const real_t ar = a[i * k + p].real();
      const real_t ai = a[i * k + p].imag();
      if (ar == 0.0 && ai == 0.0) continue;
      const real_t* br = reinterpret_cast<const real_t*>(b + p * n);
      for (std::size_t j = 0; j < n; ++j) {
        const real_t xr = br[2 * j], xi = br[2 * j + 1];
        cr[2 * j] += ar * xr - ai * xi;
        cr[2 * j + 1] += ar * xi + ai * xr;
      }
    }
  }
}

}  // namespace

void gemm(const cx* a, const cx* b, cx* c,
          std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
  if (m == 0 || n == 0) return;
  if (!accumulate) std::fill(c, c + m * n, cx{0.0, 0.0});
  if (k == 0) return;
  // Small problems: skip blocking overhead.
  if (m * n * k < 32768) {
    micro_rows(a, b, c, 0, m, 0, k, k, n);
    return;
  }
  constexpr std::size_t KB = 256;  // k-panel kept hot in L1/L2
  constexpr std::size_t IB = 64;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t ib = 0; ib < static_cast<std::ptrdiff_t>((m + IB - 1) / IB); ++ib) {
    const std::size_t i0 = static_cast<std::size_t>(ib) * IB;
    const std::size_t i1 = std::min(i0 + IB, m);
    for (std::size_t p0 = 0; p0 < k; p0 += KB) {
      const std::size_t p1 = std::min(p0 + KB, k);
      micro_rows(a, b, c, i0, i1, p0, p1, k, n);
    }
  }
}

void axpy(cx alpha, const cx* x, cx* y, std::size_t n) {
  // Explicit re/im arithmetic keeps the loop vectorizable (no __muldc3 call).
  const real_t ar = alpha.real(), ai = alpha.imag();
  const real_t* xr = reinterpret_cast<const real_t*>(x);
  real_t* yr = reinterpret_cast<real_t*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    const real_t vr = xr[2 * i], vi = xr[2 * i + 1];
    yr[2 * i] += ar * vr - ai * vi;
    yr[2 * i + 1] += ar * vi + ai * vr;
  }
}

cx dotc(const cx* x, const cx* y, std::size_t n) {
  double rr = 0.0, ri = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rr += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    ri += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return cx(static_cast<real_t>(rr), static_cast<real_t>(ri));
}

double nrm2(const cx* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(x[i]);
  return std::sqrt(s);
}

void scal(cx alpha, cx* x, std::size_t n) {
  const real_t ar = alpha.real(), ai = alpha.imag();
  real_t* xr = reinterpret_cast<real_t*>(x);
  for (std::size_t i = 0; i < n; ++i) {
    const real_t vr = xr[2 * i], vi = xr[2 * i + 1];
    xr[2 * i] = ar * vr - ai * vi;
    xr[2 * i + 1] = ar * vi + ai * vr;
  }
}

}  // namespace tnspec
