// Throughput comparison of the OpenMP-parallel kernels against their serial
// reference implementations.  Usage: bench_kernels [max_dim]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "tnspec/kernels.hpp"

using namespace tnspec;
using Clock = std::chrono::steady_clock;

namespace {

double time_gemm(void (*fn)(const cx*, const cx*, cx*, std::size_t,
                            std::size_t, std::size_t, bool),
                 const std::vector<cx>& a, const std::vector<cx>& b,
                 std::vector<cx>& c, std::size_t n, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn(a.data(), b.data(), c.data(), n, n, n, false);
    best = std::min(best,
                    std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t max_dim = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 512;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::printf("%8s %14s %14s %10s\n", "n", "serial GF/s", "parallel GF/s",
              "speedup");
  for (std::size_t n = 64; n <= max_dim; n *= 2) {
    std::vector<cx> a(n * n), b(n * n), c(n * n);
    for (auto& z : a) z = cx(g(rng), g(rng));
    for (auto& z : b) z = cx(g(rng), g(rng));
    const int reps = n >= 512 ? 3 : 7;
    const double ts = time_gemm(gemm_ref, a, b, c, n, reps);
    const double tp = time_gemm(gemm, a, b, c, n, reps);
    // one complex multiply-add = 8 flops
    const double flops = 8.0 * double(n) * n * n;
    std::printf("%8zu %14.2f %14.2f %10.2f\n", n, flops / ts / 1e9,
                flops / tp / 1e9, ts / tp);
  }
  return 0;
}
