#include "tnspec/slq.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "tnspec/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tnspec {

double SpectralFunction::operator()(double x) const {
  switch (tag) {
    case Tag::abs:
      return std::abs(x);
    case Tag::identity:
      return x;
    case Tag::xlogx_neg: {
      if (x <= 0.0) return 0.0;  // clamp: -x log2 x with 0 -> 0
      return -x * std::log2(x);
    }
    case Tag::exp_neg_beta:
      return std::exp(-beta * x);
    case Tag::square:
      return x * x;
  }
  return 0.0;
}

void SlqConfig::validate() const {
  if (tol <= 0.0 || ltol <= 0.0) throw std::invalid_argument("tol/ltol must be > 0");
  if (n_max < 3) throw std::invalid_argument("n_max must be >= 3");
  if (n_min < 2 || n_min > n_max) throw std::invalid_argument("need 2 <= n_min <= n_max");
  if (k_max < 2) throw std::invalid_argument("k_max must be >= 2");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::vector<cx> sample_vector(std::size_t dim, std::uint64_t stream_seed,
                              SlqConfig::VectorKind kind) {
  if (dim < 1) throw std::invalid_argument("sample_vector: dim must be >= 1");
  std::mt19937_64 rng(stream_seed);
  std::vector<cx> v(dim);
  if (kind == SlqConfig::VectorKind::rademacher) {
    // Real +-1 entries; unbiased for the real-valued traces of Hermitian ops.
    std::size_t i = 0;
    while (i < dim) {
      std::uint64_t bits = rng();
      for (int b = 0; b < 64 && i < dim; ++b, ++i)
        v[i] = cx{(bits >> b) & 1u ? 1.0 : -1.0, 0.0};
    }
  } else {
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& x : v) x = cx{g(rng), 0.0};
  }
  return v;
}

TridiagonalMatrix LanczosState::tridiagonal() const {
  TridiagonalMatrix t;
  t.alpha = alpha;
  // off-diagonals are beta_2..beta_k
  if (alpha.size() > 1)
    t.beta.assign(beta.begin() + 1, beta.begin() + static_cast<std::ptrdiff_t>(alpha.size()));
  return t;
}

LanczosState lanczos_init(std::vector<cx> phi) {
  LanczosState s;
  const double b1 = nrm2(phi.data(), phi.size());
  if (b1 <= 0.0) throw std::invalid_argument("lanczos: zero initial vector");
  s.beta.push_back(b1);
  scal(cx{1.0 / b1, 0.0}, phi.data(), phi.size());
  s.basis.push_back(std::move(phi));
  return s;
}

void lanczos_step(const LinOp& op, LanczosState& s) {
  if (s.invariant_subspace) return;
  const std::size_t d = s.basis.back().size();
  const std::size_t k = s.basis.size();  // this step computes alpha_k
  std::vector<cx> v(d);
  op.apply(s.basis.back().data(), v.data());
  if (k >= 2) {
    const double bk = s.beta[k - 1];
    axpy(cx{-bk, 0.0}, s.basis[k - 2].data(), v.data(), d);
  }
  const double ak = dotc(v.data(), s.basis.back().data(), d).real();
  axpy(cx{-ak, 0.0}, s.basis.back().data(), v.data(), d);
  // full reorthogonalization, one pass
  for (const auto& phi : s.basis) {
    const cx ov = dotc(phi.data(), v.data(), d);
    axpy(-ov, phi.data(), v.data(), d);
  }
  const double bk1 = nrm2(v.data(), d);
  s.alpha.push_back(ak);
  s.beta.push_back(bk1);
  if (bk1 < 1e-13 * s.beta.front() || s.basis.size() >= d) {
    s.invariant_subspace = true;  // quadrature at current k is exact
    return;
  }
  scal(cx{1.0 / bk1, 0.0}, v.data(), d);
  s.basis.push_back(std::move(v));
}

double quadrature_value(const TridiagonalMatrix& t, const SpectralFunction& f,
                        double norm_sq) {
  TridiagEig e = eig_sym_tridiagonal(t);
  double acc = 0.0;
  for (std::size_t j = 0; j < e.theta.size(); ++j)
    acc += e.tau[j] * e.tau[j] * f(e.theta[j]);
  return norm_sq * acc;
}

LanczosEstimate lanczos_estimate(const std::vector<double>& series) {
  const std::size_t k = series.size();
  if (k < 3) throw std::invalid_argument("lanczos_estimate needs >= 3 values");
  const double fk = series.back();
  const std::size_t window = std::min<std::size_t>(k, 20);
  const std::size_t start = k - window;

  // Successive differences over the window.
  std::vector<double> diffs;  // d_j = F_{j+1} - F_j, j = start..k-2
  double dmax = 0.0;
  for (std::size_t j = start; j + 1 < k; ++j) {
    diffs.push_back(series[j + 1] - series[j]);
    dmax = std::max(dmax, std::abs(diffs.back()));
  }
  if (dmax <= 1e-14 * std::max(1e-300, std::abs(fk)))
    return {fk, 1e-15 * std::abs(fk), true};

  // Log-linear fit of |d_j| = |b (r - 1)| r^j.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    const double ad = std::abs(diffs[i]);
    if (ad <= 0.0) continue;
    const double x = static_cast<double>(start + i);
    const double y = std::log(ad);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  if (m < 4) return {fk, std::abs(series[k - 1] - series[k - 2]), false};
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  const double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / static_cast<double>(m);
  const double r = std::exp(slope);
  if (!(r < 1.0) || !std::isfinite(r))
    return {fk, std::abs(series[k - 1] - series[k - 2]), false};

  const double sign = diffs.back() >= 0.0 ? 1.0 : -1.0;
  // Tail sum of the fitted future differences: sum_{j >= k-1} s e^c r^j.
  const double rk = std::exp(intercept + slope * static_cast<double>(k - 1));
  const double tail = sign * rk / (1.0 - r);
  // With r near 1 the geometric tail can dwarf everything actually observed;
  // such an extrapolation is not credible, so fall back to the raw value.
  double moved = 0.0;
  for (double dd : diffs) moved += std::abs(dd);
  if (std::abs(tail) > 5.0 * moved) return {fk, moved, false};
  const double estimate = fk + tail;

  // 1-sigma from the log-fit residuals, propagated through the tail.
  double ss = 0.0;
  std::size_t mm = 0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    const double ad = std::abs(diffs[i]);
    if (ad <= 0.0) continue;
    const double pred = intercept + slope * static_cast<double>(start + i);
    const double res = std::log(ad) - pred;
    ss += res * res;
    ++mm;
  }
  const double sigma_log = std::sqrt(ss / static_cast<double>(std::max<std::size_t>(1, mm > 2 ? mm - 2 : 1)));
  // The last observed difference floors the credible accuracy: a short
  // window can fit its few points exactly while the series is still moving.
  const double error = std::abs(tail) * (std::exp(sigma_log) - 1.0) +
                       std::abs(diffs.back()) + 1e-15 * std::abs(fk);
  return {estimate, error, true};
}

double slq_single_sample(const LinOp& op, const SpectralFunction& f,
                         const SlqConfig& cfg, std::uint64_t sample_index) {
  std::vector<cx> phi =
      sample_vector(op.cols(), cfg.seed ^ splitmix64(sample_index), cfg.vector_kind);
  LanczosState s = lanczos_init(std::move(phi));
  const double norm_sq = s.beta.front() * s.beta.front();
  std::vector<double> series;
  double g = 0.0;
  for (std::size_t k = 1; k <= cfg.k_max; ++k) {
    lanczos_step(op, s);
    series.push_back(quadrature_value(s.tridiagonal(), f, norm_sq));
    g = series.back();
    if (s.invariant_subspace) break;  // exact at this k
    if (series.size() >= 3) {
      LanczosEstimate est = lanczos_estimate(series);
      if (est.decaying && est.error < cfg.ltol * std::abs(est.estimate)) {
        g = est.estimate;
        break;
      }
      g = est.estimate;
    }
  }
  return g;
}

TraceEstimate slq_trace(const LinOp& op, const SpectralFunction& f,
                        const SlqConfig& cfg) {
  cfg.validate();
  if (op.rows() != op.cols())
    throw std::invalid_argument("slq_trace: operator must be square");

  // Probabilistic Hermiticity spot check with one random pair.
  {
    const std::size_t d = op.cols();
    std::vector<cx> u = sample_vector(d, cfg.seed ^ splitmix64(0xabcdef12ull),
                                      SlqConfig::VectorKind::gaussian);
    std::vector<cx> v = sample_vector(d, cfg.seed ^ splitmix64(0x12fedcbaull),
                                      SlqConfig::VectorKind::gaussian);
    std::vector<cx> xv(d), xu(d);
    op.apply(v.data(), xv.data());
    op.apply(u.data(), xu.data());
    const cx uxv = dotc(u.data(), xv.data(), d);
    const cx vxu = dotc(v.data(), xu.data(), d);
    const double scale = std::max({std::abs(uxv), std::abs(vxu), 1e-300});
    if (std::abs(uxv - std::conj(vxu)) > 1e-8 * scale)
      throw std::invalid_argument("slq_trace: operator failed Hermiticity check");
  }

  TraceEstimate te;
  std::size_t stop_n = 0;
#ifdef _OPENMP
  const std::size_t batch = std::max(1, omp_get_max_threads());
#else
  const std::size_t batch = 1;
#endif
  while (te.samples.size() < cfg.n_max && stop_n == 0) {
    const std::size_t n0 = te.samples.size();
    const std::size_t n1 = std::min(cfg.n_max, n0 + batch);
    te.samples.resize(n1);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n0);
         i < static_cast<std::ptrdiff_t>(n1); ++i) {
      te.samples[static_cast<std::size_t>(i)] =
          slq_single_sample(op, f, cfg, static_cast<std::uint64_t>(i));
    }
    // Convergence is judged on sample prefixes, so the stopping point does
    // not depend on the batch size or thread count.
    for (std::size_t n = n0 + 1; n <= n1; ++n) {
      if (n < cfg.n_min) continue;
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += te.samples[i];
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = te.samples[i] - mean;
        var += d * d;
      }
      var /= static_cast<double>(n - 1);
      const double se = std::sqrt(var / static_cast<double>(n));
      if (se < cfg.tol * std::abs(mean)) {
        stop_n = n;
        break;
      }
    }
  }
  if (stop_n == 0) stop_n = te.samples.size();
  te.samples.resize(stop_n);
  te.n_used = stop_n;
  double mean = 0.0;
  for (double g : te.samples) mean += g;
  mean /= static_cast<double>(stop_n);
  double var = 0.0;
  for (double g : te.samples) var += (g - mean) * (g - mean);
  var /= static_cast<double>(std::max<std::size_t>(1, stop_n - 1));
  te.mean = mean;
  te.variance = var;
  te.std_error = std::sqrt(var / static_cast<double>(stop_n));
  te.converged = te.std_error < cfg.tol * std::abs(te.mean) && stop_n >= cfg.n_min;
  return te;
}

}  // namespace tnspec
