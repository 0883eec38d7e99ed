#include "tnspec/pts.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace tnspec {

namespace {

std::string site_label(std::size_t i) { return "s" + std::to_string(i); }

}  // namespace

PureState PureState::from_tensor(Tensor t, std::size_t p) {
  PureState psi;
  psi.num_sites = t.rank();
  psi.phys_dim = p;
  std::vector<Index> idx;
  for (std::size_t i = 0; i < t.rank(); ++i) {
    if (t.indices()[i].dim != p)
      throw std::invalid_argument("from_tensor: site dim mismatch");
    idx.push_back({site_label(i), p});
  }
  psi.tensor = Tensor(std::move(idx), std::move(t.data()));
  return psi;
}

void TriPartition::validate(std::size_t num_sites) const {
  if (sites_a.empty() || sites_b.empty())
    throw std::invalid_argument("partition: A and B must be non-empty");
  std::vector<char> seen(num_sites, 0);
  auto mark = [&](const std::vector<std::size_t>& v) {
    for (std::size_t s : v) {
      if (s >= num_sites) throw std::invalid_argument("partition: site out of range");
      if (seen[s]) throw std::invalid_argument("partition: site repeated");
      seen[s] = 1;
    }
  };
  mark(sites_a);
  mark(sites_b);
  mark(sites_c);
  for (char c : seen)
    if (!c) throw std::invalid_argument("partition: sites must cover the chain");
}

namespace {
std::size_t pow_dim(std::size_t p, std::size_t n) {
  std::size_t d = 1;
  while (n--) d *= p;
  return d;
}
}  // namespace

std::size_t TriPartition::dim_a(std::size_t p) const { return pow_dim(p, sites_a.size()); }
std::size_t TriPartition::dim_b(std::size_t p) const { return pow_dim(p, sites_b.size()); }
std::size_t TriPartition::dim_c(std::size_t p) const { return pow_dim(p, sites_c.size()); }

Tensor partition_state(const PureState& psi, const TriPartition& part) {
  part.validate(psi.num_sites);
  auto labels_of = [](const std::vector<std::size_t>& sites) {
    std::vector<std::string> out;
    for (std::size_t s : sites) out.push_back(site_label(s));
    return out;
  };
  std::vector<IndexGroup> groups;
  groups.push_back({"A", labels_of(part.sites_a)});
  groups.push_back({"B", labels_of(part.sites_b)});
  groups.push_back({"C", labels_of(part.sites_c)});  // may be empty -> dim 1
  return group_indices(psi.tensor, groups);
}

TnOperator build_pt_operator(const Tensor& psi_abc) {
  if (psi_abc.rank() != 3)
    throw std::invalid_argument("build_pt_operator: rank-3 ABC tensor expected");
  Tensor ket = relabel(psi_abc, {{"A", "pa"}, {"B", "pbr"}, {"C", "pc"}});
  Tensor bra = conjugate(relabel(psi_abc, {{"A", "par"}, {"B", "pb"}, {"C", "pc"}}));
  TensorNetwork net;
  net.tensors.push_back(std::move(ket));
  net.tensors.push_back(std::move(bra));
  return TnOperator(std::move(net), {"pa", "pb"}, {"par", "pbr"});
}

LognegResult logneg_pts(const PureState& psi, const TriPartition& part,
                        const SlqConfig& cfg) {
  Tensor psi_abc = partition_state(psi, part);
  TnOperator op = build_pt_operator(psi_abc);
  LognegResult res;
  res.trace = slq_trace(op, SpectralFunction::absval(), cfg);
  const double t = std::max(res.trace.mean, 1.0);
  res.value = std::log2(t);
  res.error = res.trace.std_error / (t * std::log(2.0));
  return res;
}

PureState random_pure_state(std::size_t num_sites, std::uint64_t seed,
                            std::size_t phys_dim) {
  const std::size_t dim = pow_dim(phys_dim, num_sites);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Index> idx;
  for (std::size_t i = 0; i < num_sites; ++i)
    idx.push_back({site_label(i), phys_dim});
  std::vector<cx> amps(dim);
  for (auto& z : amps)
    z = cx(static_cast<real_t>(gauss(rng)), static_cast<real_t>(gauss(rng)));
  Tensor t(std::move(idx), std::move(amps));
  const double n = t.norm();
  for (auto& z : t.data()) z *= static_cast<real_t>(1.0 / n);
  PureState psi;
  psi.tensor = std::move(t);
  psi.num_sites = num_sites;
  psi.phys_dim = phys_dim;
  return psi;
}

double analytic_random_logneg(double d_a, double d_b, double d_c) {
  const double r = 2.0 * std::sqrt(d_a * d_b / d_c);
  if (r <= 1.0) return 0.0;
  const double pi = 3.14159265358979323846;
  const double x = 1.0 / r;
  const double t = (2.0 / pi) * std::asin(x) +
                   2.0 * (1.0 + 2.0 * r * r) / (3.0 * pi * r) *
                       std::sqrt(1.0 - x * x);
  return std::log2(t);
}

}  // namespace tnspec
