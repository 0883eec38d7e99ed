#include "tnspec/linop.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace tnspec {

std::vector<std::string> TensorNetwork::open_labels() const {
  std::map<std::string, int> count;
  std::vector<std::string> order;  // first-appearance order
  for (const auto& t : tensors)
    for (const auto& idx : t.indices()) {
      if (count[idx.label]++ == 0) order.push_back(idx.label);
    }
  std::vector<std::string> open;
  for (const auto& l : order)
    if (count[l] == 1) open.push_back(l);
  return open;
}

void TensorNetwork::validate() const {
  std::map<std::string, std::pair<int, std::size_t>> seen;  // count, dim
  for (const auto& t : tensors)
    for (const auto& idx : t.indices()) {
      auto [it, fresh] = seen.try_emplace(idx.label, std::pair<int, std::size_t>{0, idx.dim});
      it->second.first++;
      if (!fresh && it->second.second != idx.dim)
        throw std::invalid_argument("network label '" + idx.label + "' dim mismatch");
      if (it->second.first > 2)
        throw std::invalid_argument("network label '" + idx.label +
                                    "' appears more than twice");
    }
}

namespace {

struct NodeInfo {
  std::set<std::string> labels;
  std::size_t size = 1;
};

std::size_t label_dim(const std::vector<NodeInfo>& nodes,
                      const std::map<std::string, std::size_t>& dims,
                      const std::string& l) {
  (void)nodes;
  return dims.at(l);
}

}  // namespace

ContractionPath plan_path(const TensorNetwork& network,
                          const std::vector<std::string>& probe_labels) {
  std::map<std::string, std::size_t> dims;
  std::vector<NodeInfo> nodes;
  auto add_node = [&](const std::vector<Index>& idx) {
    NodeInfo n;
    for (const auto& i : idx) {
      n.labels.insert(i.label);
      n.size *= i.dim;
      dims[i.label] = i.dim;
    }
    nodes.push_back(std::move(n));
  };
  for (const auto& t : network.tensors) add_node(t.indices());
  if (!probe_labels.empty()) {
    std::vector<Index> pidx;
    std::map<std::string, std::size_t> net_dims;
    for (const auto& t : network.tensors)
      for (const auto& i : t.indices()) net_dims[i.label] = i.dim;
    for (const auto& l : probe_labels) {
      auto it = net_dims.find(l);
      if (it == net_dims.end())
        throw std::invalid_argument("probe label '" + l + "' not in network");
      pidx.push_back({l, it->second});
    }
    add_node(pidx);
  }

  ContractionPath path;
  auto simulate = [&](std::size_t a, std::size_t b) {
    // result labels = symmetric difference; flops = prod(union of dims)
    NodeInfo r;
    double fl = 1.0;
    for (const auto& l : nodes[a].labels) fl *= static_cast<double>(dims.at(l));
    for (const auto& l : nodes[b].labels)
      if (!nodes[a].labels.count(l)) fl *= static_cast<double>(dims.at(l));
    for (const auto& l : nodes[a].labels)
      if (!nodes[b].labels.count(l)) r.labels.insert(l);
    for (const auto& l : nodes[b].labels)
      if (!nodes[a].labels.count(l)) r.labels.insert(l);
    r.size = 1;
    for (const auto& l : r.labels) r.size *= label_dim(nodes, dims, l);
    return std::pair<NodeInfo, double>{std::move(r), fl};
  };

  while (nodes.size() > 1) {
    bool found = false;
    std::size_t best_a = 0, best_b = 0;
    std::size_t best_size = 0;
    double best_flops = 0.0;
    for (std::size_t a = 0; a < nodes.size(); ++a)
      for (std::size_t b = a + 1; b < nodes.size(); ++b) {
        bool shares = false;
        for (const auto& l : nodes[a].labels)
          if (nodes[b].labels.count(l)) { shares = true; break; }
        if (!shares) continue;
        auto [r, fl] = simulate(a, b);
        if (!found || r.size < best_size ||
            (r.size == best_size && fl < best_flops)) {
          found = true;
          best_a = a;
          best_b = b;
          best_size = r.size;
          best_flops = fl;
        }
      }
    if (!found) {
      // Disconnected remainder: outer products by ascending size.
      std::size_t a = 0, b = 1;
      for (std::size_t i = 1; i < nodes.size(); ++i)
        if (nodes[i].size < nodes[a].size) a = i;
      b = (a == 0) ? 1 : 0;
      for (std::size_t i = 0; i < nodes.size(); ++i)
        if (i != a && nodes[i].size < nodes[b].size) b = i;
      if (a > b) std::swap(a, b);
      best_a = a;
      best_b = b;
      auto [r, fl] = simulate(a, b);
      best_size = r.size;
      best_flops = fl;
    }
    auto [r, fl] = simulate(best_a, best_b);
    path.steps.emplace_back(best_a, best_b);
    path.peak_intermediate = std::max(path.peak_intermediate, r.size);
    path.flops += fl;
    nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(best_b));
    nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(best_a));
    nodes.push_back(std::move(r));
  }
  return path;
}

TnOperator::TnOperator(TensorNetwork network, std::vector<std::string> left_labels,
                       std::vector<std::string> right_labels)
    : network_(std::move(network)),
      left_labels_(std::move(left_labels)),
      right_labels_(std::move(right_labels)) {
  network_.validate();
  auto open = network_.open_labels();
  std::set<std::string> open_set(open.begin(), open.end());
  std::set<std::string> used;
  std::map<std::string, std::size_t> dims;
  for (const auto& t : network_.tensors)
    for (const auto& i : t.indices()) dims[i.label] = i.dim;
  for (const auto& l : left_labels_) {
    if (!open_set.count(l))
      throw std::invalid_argument("left label '" + l + "' is not open");
    if (!used.insert(l).second)
      throw std::invalid_argument("label '" + l + "' listed twice");
    dim_left_ *= dims.at(l);
  }
  for (const auto& l : right_labels_) {
    if (!open_set.count(l))
      throw std::invalid_argument("right label '" + l + "' is not open");
    if (!used.insert(l).second)
      throw std::invalid_argument("label '" + l + "' listed twice");
    dim_right_ *= dims.at(l);
  }
  if (used.size() != open_set.size())
    throw std::invalid_argument("left/right groups must cover all open labels");
  path_ = plan_path(network_, right_labels_);
}

void TnOperator::apply(const cx* in, cx* out) const {
  // Probe tensor over the right labels, row-major in their listed order.
  std::map<std::string, std::size_t> dims;
  for (const auto& t : network_.tensors)
    for (const auto& i : t.indices()) dims[i.label] = i.dim;
  std::vector<Index> pidx;
  for (const auto& l : right_labels_) pidx.push_back({l, dims.at(l)});
  Tensor probe(std::move(pidx), std::vector<cx>(in, in + dim_right_));

  std::vector<Tensor> work = network_.tensors;
  work.push_back(std::move(probe));
  for (const auto& [a, b] : path_.steps) {
    Tensor r = contract_pair(work[a], work[b]);
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(b));
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(a));
    work.push_back(std::move(r));
  }
  Tensor res = work.front().permuted(left_labels_);
  std::copy(res.data().begin(), res.data().end(), out);
}

const TnOperator& TnOperator::adjoint_op() const {
  std::call_once(adj_once_, [&] {
    TensorNetwork adj;
    adj.tensors.reserve(network_.tensors.size());
    for (const auto& t : network_.tensors) adj.tensors.push_back(conjugate(t));
    adj_ = std::make_shared<TnOperator>(std::move(adj), right_labels_, left_labels_);
  });
  return *adj_;
}

void TnOperator::apply_adjoint(const cx* in, cx* out) const {
  adjoint_op().apply(in, out);
}

std::vector<cx> matvec(const TnOperator& op, const std::vector<cx>& v) {
  if (v.size() != op.dim_right())
    throw std::invalid_argument("matvec dim mismatch");
  for (const auto& x : v)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw std::invalid_argument("matvec: non-finite probe");
  std::vector<cx> out(op.dim_left());
  op.apply(v.data(), out.data());
  return out;
}

Matrix to_dense(const TnOperator& op, std::size_t entry_cap) {
  if (op.dim_left() * op.dim_right() > entry_cap)
    throw std::runtime_error("to_dense: operator exceeds entry cap");
  ContractionPath path = plan_path(op.network(), {});
  std::vector<Tensor> work = op.network().tensors;
  for (const auto& [a, b] : path.steps) {
    Tensor r = contract_pair(work[a], work[b]);
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(b));
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(a));
    work.push_back(std::move(r));
  }
  std::vector<std::string> order = op.left_labels();
  order.insert(order.end(), op.right_labels().begin(), op.right_labels().end());
  Tensor res = work.front().permuted(order);
  Matrix m(op.dim_left(), op.dim_right());
  std::copy(res.data().begin(), res.data().end(), m.data.begin());
  return m;
}

}  // namespace tnspec
