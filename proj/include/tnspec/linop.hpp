#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "tnspec/linalg.hpp"
#include "tnspec/tensor.hpp"

namespace tnspec {

// A set of tensors; labels may appear at most twice (shared = contracted),
// labels appearing exactly once are the open indices.
struct TensorNetwork {
  std::vector<Tensor> tensors;

  std::vector<std::string> open_labels() const;
  void validate() const;
};

// One pairwise contraction: positions (a, b) in the working list; both are
// removed and the result appended at the back.
struct ContractionPath {
  std::vector<std::pair<std::size_t, std::size_t>> steps;
  std::size_t peak_intermediate = 0;  // entries
  double flops = 0.0;                 // scalar multiply estimate
};

// Greedy planner: repeatedly contract the pair minimizing the resulting
// tensor size; ties broken by flop count, then smallest index pair.  The
// probe enters as one more tensor over probe_labels.
ContractionPath plan_path(const TensorNetwork& network,
                          const std::vector<std::string>& probe_labels);

// Lazily contracted linear operator: fused left index group <- right group.
class TnOperator final : public LinOp {
 public:
  TnOperator(TensorNetwork network, std::vector<std::string> left_labels,
             std::vector<std::string> right_labels);

  std::size_t dim_left() const { return dim_left_; }
  std::size_t dim_right() const { return dim_right_; }
  const TensorNetwork& network() const { return network_; }
  const std::vector<std::string>& left_labels() const { return left_labels_; }
  const std::vector<std::string>& right_labels() const { return right_labels_; }
  const ContractionPath& path() const { return path_; }

  // LinOp interface (read-only, safe for concurrent calls).
  std::size_t rows() const override { return dim_left_; }
  std::size_t cols() const override { return dim_right_; }
  void apply(const cx* in, cx* out) const override;
  void apply_adjoint(const cx* in, cx* out) const override;

 private:
  const TnOperator& adjoint_op() const;

  TensorNetwork network_;
  std::vector<std::string> left_labels_, right_labels_;
  std::size_t dim_left_ = 1, dim_right_ = 1;
  ContractionPath path_;

  mutable std::once_flag adj_once_;
  mutable std::shared_ptr<TnOperator> adj_;
};

std::vector<cx> matvec(const TnOperator& op, const std::vector<cx>& v);

// Full matrix form; test/oracle support only.
Matrix to_dense(const TnOperator& op, std::size_t entry_cap = (1ull << 26));

}  // namespace tnspec
