#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "daal/tensor.hpp"

namespace daal {

namespace detail {

struct Node {
  Tensor value;
  Tensor grad;  // allocated lazily; same shape as value once present
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  bool is_leaf() const noexcept { return parents.empty(); }
  Tensor& ensure_grad();
};

}  // namespace detail

// Handle to a node of the recorded computation graph. Copies share the node.
// Leaves with requires_grad accumulate gradients across backward() calls
// until zero_grad(); interior nodes are recomputed on every pass.
class Variable {
 public:
  Variable() = default;

  static Variable leaf(Tensor value, bool requires_grad = true);
  static Variable constant(Tensor value) { return leaf(std::move(value), false); }

  bool defined() const noexcept { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }

  bool requires_grad() const noexcept { return node_ && node_->requires_grad; }
  bool has_grad() const noexcept { return node_ && node_->grad.shape() == node_->value.shape(); }
  const Tensor& grad() const { return node_->grad; }
  Tensor& mutable_grad() { return node_->ensure_grad(); }
  void zero_grad();

  // Internal: used by op implementations.
  static Variable from_node(std::shared_ptr<detail::Node> node);
  const std::shared_ptr<detail::Node>& node() const noexcept { return node_; }

 private:
  std::shared_ptr<detail::Node> node_;
};

// Runs reverse-mode differentiation from a scalar loss.
void backward(const Variable& loss);

// Disables graph recording on the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled() noexcept;

// --- operations -----------------------------------------------------------
// Binary elementwise ops accept equal shapes or a rank-0 scalar on either side.

Variable matmul(const Variable& a, const Variable& b);
Variable add(const Variable& a, const Variable& b);
Variable sub(const Variable& a, const Variable& b);
Variable mul(const Variable& a, const Variable& b);
Variable scale(const Variable& a, double factor);
Variable add_scalar(const Variable& a, double offset);
Variable relu(const Variable& a);
Variable sigmoid(const Variable& a);
Variable exp(const Variable& a);
Variable log(const Variable& a);
Variable tanh(const Variable& a);
Variable square(const Variable& a);
// Clamps into [lo, hi]; gradient passes only where the input was inside.
Variable clamp(const Variable& a, double lo, double hi);

// x[n×k] + bias[1×k] added to every row.
Variable add_row_vector(const Variable& x, const Variable& bias);
// Columns [begin, begin+count) of a matrix.
Variable slice_cols(const Variable& a, std::size_t begin, std::size_t count);
// Per-row sums of a matrix: [n×k] -> [n×1].
Variable row_sum(const Variable& a);
Variable sum(const Variable& a);
Variable mean(const Variable& a);

// Mean over rows of -log softmax(logits)[label].
Variable softmax_cross_entropy(const Variable& logits, std::span<const int> labels);

// Row-wise softmax with max subtraction (no graph).
Tensor softmax(const Tensor& logits);

}  // namespace daal
