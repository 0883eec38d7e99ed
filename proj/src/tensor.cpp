#include "tnspec/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "tnspec/kernels.hpp"

namespace tnspec {

namespace {

std::size_t product_of_dims(const std::vector<Index>& idx) {
  std::size_t n = 1;
  for (const auto& i : idx) n *= i.dim;
  return n;
}

void check_distinct(const std::vector<Index>& idx) {
  std::set<std::string> seen;
  for (const auto& i : idx) {
    if (i.dim < 1) throw std::invalid_argument("index '" + i.label + "' has dim 0");
    if (!seen.insert(i.label).second)
      throw std::invalid_argument("duplicate index label '" + i.label + "'");
  }
}

}  // namespace

Tensor::Tensor(std::vector<Index> indices) : indices_(std::move(indices)) {
  check_distinct(indices_);
  data_.assign(product_of_dims(indices_), cx{0.0, 0.0});
}

Tensor::Tensor(std::vector<Index> indices, std::vector<cx> data)
    : indices_(std::move(indices)), data_(std::move(data)) {
  check_distinct(indices_);
  if (data_.size() != product_of_dims(indices_))
    throw std::invalid_argument("tensor data length does not match index dims");
}

Tensor Tensor::scalar(cx value) {
  Tensor t;
  t.data_[0] = value;
  return t;
}

bool Tensor::has_label(const std::string& label) const {
  for (const auto& i : indices_)
    if (i.label == label) return true;
  return false;
}

std::size_t Tensor::index_of(const std::string& label) const {
  for (std::size_t k = 0; k < indices_.size(); ++k)
    if (indices_[k].label == label) return k;
  throw std::invalid_argument("unknown index label '" + label + "'");
}

std::size_t Tensor::dim(const std::string& label) const {
  return indices_[index_of(label)].dim;
}

namespace {
std::size_t flat_offset(const std::vector<Index>& indices,
                        std::span<const std::size_t> idx) {
  if (idx.size() != indices.size())
    throw std::invalid_argument("multi-index rank mismatch");
  std::size_t off = 0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (idx[k] >= indices[k].dim) throw std::out_of_range("index out of range");
    off = off * indices[k].dim + idx[k];
  }
  return off;
}
}  // namespace

cx& Tensor::at(std::span<const std::size_t> idx) {
  return data_[flat_offset(indices_, idx)];
}
cx Tensor::at(std::span<const std::size_t> idx) const {
  return data_[flat_offset(indices_, idx)];
}
cx Tensor::at(std::initializer_list<std::size_t> idx) const {
  std::vector<std::size_t> v(idx);
  return data_[flat_offset(indices_, v)];
}

Tensor Tensor::permuted(const std::vector<std::string>& order) const {
  if (order.size() != indices_.size())
    throw std::invalid_argument("permutation must cover all indices");
  std::vector<std::size_t> perm(order.size());  // perm[k] = old position of new axis k
  for (std::size_t k = 0; k < order.size(); ++k) perm[k] = index_of(order[k]);
  // Identity?
  bool ident = true;
  for (std::size_t k = 0; k < perm.size(); ++k)
    if (perm[k] != k) { ident = false; break; }
  if (ident) return *this;

  const std::size_t r = indices_.size();
  std::vector<Index> new_idx(r);
  for (std::size_t k = 0; k < r; ++k) new_idx[k] = indices_[perm[k]];

  // Old row-major strides, gathered in new axis order.
  std::vector<std::size_t> old_stride(r, 1);
  for (std::size_t k = r; k-- > 1;)
    old_stride[k - 1] = old_stride[k] * indices_[k].dim;
  std::vector<std::size_t> stride(r), dims(r);
  for (std::size_t k = 0; k < r; ++k) {
    stride[k] = old_stride[perm[k]];
    dims[k] = new_idx[k].dim;
  }

  std::vector<cx> out(data_.size());
  // Walk output linearly; maintain input offset via counters.
  std::vector<std::size_t> counter(r, 0);
  std::size_t in_off = 0;
  const std::size_t total = data_.size();
  const std::size_t inner_n = dims[r - 1];
  const std::size_t inner_s = stride[r - 1];
  for (std::size_t out_off = 0; out_off < total;) {
    std::size_t o = in_off;
    for (std::size_t j = 0; j < inner_n; ++j, o += inner_s)
      out[out_off++] = data_[o];
    // carry over the remaining axes
    for (std::size_t k = r - 1; k-- > 0;) {
      in_off += stride[k];
      if (++counter[k] < dims[k]) break;
      counter[k] = 0;
      in_off -= stride[k] * dims[k];
    }
  }
  return Tensor(std::move(new_idx), std::move(out));
}

double Tensor::norm() const { return nrm2(data_.data(), data_.size()); }

Tensor contract_pair(const Tensor& a, const Tensor& b) {
  // Shared labels, in a's order.
  std::vector<std::string> shared;
  for (const auto& ia : a.indices())
    if (b.has_label(ia.label)) {
      if (b.dim(ia.label) != ia.dim)
        throw std::invalid_argument("contraction dim mismatch on label '" +
                                    ia.label + "'");
      shared.push_back(ia.label);
    }

  std::vector<std::string> free_a, free_b;
  for (const auto& ia : a.indices())
    if (!b.has_label(ia.label)) free_a.push_back(ia.label);
  for (const auto& ib : b.indices())
    if (!a.has_label(ib.label)) free_b.push_back(ib.label);
  for (const auto& fa : free_a)
    for (const auto& fb : free_b)
      if (fa == fb) throw std::invalid_argument("free label collision '" + fa + "'");

  std::vector<std::string> order_a = free_a;
  order_a.insert(order_a.end(), shared.begin(), shared.end());
  std::vector<std::string> order_b = shared;
  order_b.insert(order_b.end(), free_b.begin(), free_b.end());

  Tensor ap = a.permuted(order_a);
  Tensor bp = b.permuted(order_b);

  std::size_t K = 1;
  for (const auto& s : shared) K *= a.dim(s);
  const std::size_t M = ap.size() / K;
  const std::size_t N = bp.size() / K;

  std::vector<Index> out_idx;
  for (const auto& f : free_a) out_idx.push_back(ap.indices()[ap.index_of(f)]);
  for (const auto& f : free_b) out_idx.push_back(bp.indices()[bp.index_of(f)]);

  std::vector<cx> out(M * N);
  gemm(ap.data().data(), bp.data().data(), out.data(), M, K, N);
  return Tensor(std::move(out_idx), std::move(out));
}

Tensor contract_all(const std::vector<Tensor>& tensors) {
  if (tensors.empty()) return Tensor::scalar(cx{1.0, 0.0});
  Tensor acc = tensors.front();
  for (std::size_t i = 1; i < tensors.size(); ++i)
    acc = contract_pair(acc, tensors[i]);
  return acc;
}

Tensor group_indices(const Tensor& t, const std::vector<IndexGroup>& groups) {
  std::set<std::string> used;
  for (const auto& g : groups) {
    if (g.members.empty()) continue;  // fused to a trailing dim-1 index
    for (const auto& m : g.members) {
      t.index_of(m);  // throws on unknown label
      if (!used.insert(m).second)
        throw std::invalid_argument("overlapping groups at label '" + m + "'");
    }
  }
  // Target order: walk original indices; at a group's first member splice in
  // the whole group, skip later members; ungrouped labels stay put.
  std::vector<std::string> order;
  for (const auto& idx : t.indices()) {
    bool grouped = false;
    for (const auto& g : groups) {
      auto it = std::find(g.members.begin(), g.members.end(), idx.label);
      if (it == g.members.end()) continue;
      grouped = true;
      if (it == g.members.begin())
        order.insert(order.end(), g.members.begin(), g.members.end());
      break;
    }
    if (!grouped) order.push_back(idx.label);
  }
  Tensor p = t.permuted(order);

  std::vector<Index> out_idx;
  for (std::size_t k = 0; k < p.indices().size();) {
    const auto& label = p.indices()[k].label;
    const IndexGroup* g = nullptr;
    for (const auto& gi : groups)
      if (!gi.members.empty() && gi.members.front() == label) { g = &gi; break; }
    if (g) {
      std::size_t d = 1;
      for (const auto& m : g->members) d *= t.dim(m);
      out_idx.push_back({g->fused_label, d});
      k += g->members.size();
    } else {
      out_idx.push_back(p.indices()[k]);
      ++k;
    }
  }
  for (const auto& g : groups)
    if (g.members.empty()) out_idx.push_back({g.fused_label, 1});
  std::vector<cx> data = std::move(p.data());
  return Tensor(std::move(out_idx), std::move(data));
}

Tensor split_index(const Tensor& t, const std::string& fused_label,
                   const std::vector<Index>& parts) {
  const std::size_t pos = t.index_of(fused_label);
  std::size_t d = 1;
  for (const auto& p : parts) d *= p.dim;
  if (d != t.indices()[pos].dim)
    throw std::invalid_argument("split dims do not factor index '" + fused_label + "'");
  std::vector<Index> out_idx;
  for (std::size_t k = 0; k < t.indices().size(); ++k) {
    if (k == pos)
      out_idx.insert(out_idx.end(), parts.begin(), parts.end());
    else
      out_idx.push_back(t.indices()[k]);
  }
  std::vector<cx> data = t.data();
  return Tensor(std::move(out_idx), std::move(data));
}

Tensor relabel(const Tensor& t,
               const std::unordered_map<std::string, std::string>& mapping) {
  std::vector<Index> out_idx = t.indices();
  for (auto& idx : out_idx) {
    auto it = mapping.find(idx.label);
    if (it != mapping.end()) idx.label = it->second;
  }
  std::set<std::string> seen;
  for (const auto& idx : out_idx)
    if (!seen.insert(idx.label).second)
      throw std::invalid_argument("relabel creates duplicate label '" + idx.label + "'");
  std::vector<cx> data = t.data();
  return Tensor(std::move(out_idx), std::move(data));
}

Tensor conjugate(const Tensor& t) {
  std::vector<cx> data = t.data();
  for (auto& v : data) v = std::conj(v);
  std::vector<Index> idx = t.indices();
  return Tensor(std::move(idx), std::move(data));
}

}  // namespace tnspec
