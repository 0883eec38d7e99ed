#pragma once

#include <cstddef>

#include "tnspec/config.hpp"

// Low-level dense kernels. Everything is row-major and interleaved complex.
// Each kernel has a serial reference (`*_ref`) used by the tests and the
// benchmark target; the default entry points are blocked and OpenMP-parallel.

namespace tnspec {

// C (m x n) = A (m x k) * B (k x n).  beta=0 overwrites C, beta=1 accumulates.
void gemm_ref(const cx* a, const cx* b, cx* c,
              std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);

void gemm(const cx* a, const cx* b, cx* c,
          std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);

// y += alpha * x
void axpy(cx alpha, const cx* x, cx* y, std::size_t n);

// <x|y> with conjugation on x
cx dotc(const cx* x, const cx* y, std::size_t n);

double nrm2(const cx* x, std::size_t n);

void scal(cx alpha, cx* x, std::size_t n);

}  // namespace tnspec
