#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tnspec/config.hpp"

namespace tnspec {

// A labelled tensor dimension.
struct Index {
  std::string label;
  std::size_t dim = 1;

  friend bool operator==(const Index& a, const Index& b) {
    return a.label == b.label && a.dim == b.dim;
  }
};

// Dense tensor over an ordered list of labelled indices, row-major flat
// storage.  Tensors are immutable values in practice: every operation below
// returns a new tensor.
class Tensor {
 public:
  Tensor() : data_(1, cx{0.0, 0.0}) {}  // rank-0 scalar
  explicit Tensor(std::vector<Index> indices);
  Tensor(std::vector<Index> indices, std::vector<cx> data);

  static Tensor scalar(cx value);

  const std::vector<Index>& indices() const { return indices_; }
  std::size_t rank() const { return indices_.size(); }
  std::size_t size() const { return data_.size(); }
  const std::vector<cx>& data() const { return data_; }
  std::vector<cx>& data() { return data_; }

  bool has_label(const std::string& label) const;
  std::size_t index_of(const std::string& label) const;  // throws if missing
  std::size_t dim(const std::string& label) const;

  // Element access by multi-index (slow; tests and small oracles only).
  cx& at(std::span<const std::size_t> idx);
  cx at(std::span<const std::size_t> idx) const;
  cx at(std::initializer_list<std::size_t> idx) const;

  // Reorder indices to the given label order (must be a permutation of all
  // labels); storage is permuted consistently.
  Tensor permuted(const std::vector<std::string>& order) const;

  double norm() const;

 private:
  std::vector<Index> indices_;
  std::vector<cx> data_;
};

// Pairwise contraction over all shared labels (reshape -> GEMM -> reshape).
// Result indices: a's free labels followed by b's free labels.
Tensor contract_pair(const Tensor& a, const Tensor& b);

// Contract a chain left-to-right.
Tensor contract_all(const std::vector<Tensor>& tensors);

struct IndexGroup {
  std::string fused_label;
  std::vector<std::string> members;  // fused dim = product of member dims
};

// Fuse each group of (made-adjacent) labels into one index.  Ungrouped
// indices are untouched; each fused index takes the position of the group's
// first member.
Tensor group_indices(const Tensor& t, const std::vector<IndexGroup>& groups);

// Inverse of group_indices, given the original member indices of one fused
// label.
Tensor split_index(const Tensor& t, const std::string& fused_label,
                   const std::vector<Index>& parts);

Tensor relabel(const Tensor& t,
               const std::unordered_map<std::string, std::string>& mapping);

Tensor conjugate(const Tensor& t);

}  // namespace tnspec
