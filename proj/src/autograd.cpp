#include "daal/autograd.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "daal/error.hpp"

namespace daal {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapConst = Eigen::Map<const RowMatrix>;
using MapMut = Eigen::Map<RowMatrix>;

thread_local bool g_grad_enabled = true;

MapConst as_matrix(const Tensor& t) { return MapConst(t.data().data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())); }
MapMut as_matrix(Tensor& t) { return MapMut(t.data().data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())); }

using NodePtr = std::shared_ptr<detail::Node>;

Variable make_result(Tensor value, std::vector<NodePtr> parents, std::function<void(detail::Node&)> fn) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  const bool track = g_grad_enabled && std::any_of(parents.begin(), parents.end(),
                                                   [](const NodePtr& p) { return p->requires_grad; });
  if (track) {
    node->requires_grad = true;
    node->parents = std::move(parents);
    node->backward_fn = std::move(fn);
  }
  return Variable::from_node(std::move(node));
}

void require_defined(const Variable& v, const char* op) {
  if (!v.defined()) throw ContractError(std::string(op) + ": undefined variable");
}

void require_matrix(const Variable& v, const char* op) {
  if (v.value().rank() != 2) {
    throw DimensionError(std::string(op) + ": expected a matrix, got " + shape_str(v.shape()));
  }
}

enum class Broadcast { same, left_scalar, right_scalar };

Broadcast check_binary(const Variable& a, const Variable& b, const char* op) {
  require_defined(a, op);
  require_defined(b, op);
  if (a.shape() == b.shape()) return Broadcast::same;
  if (b.value().is_scalar()) return Broadcast::right_scalar;
  if (a.value().is_scalar()) return Broadcast::left_scalar;
  throw DimensionError(std::string(op) + ": incompatible shapes " + shape_str(a.shape()) + " and " +
                       shape_str(b.shape()));
}

// Applies f(x, y) elementwise with scalar broadcast; returns the result tensor.
template <typename F>
Tensor binary_map(const Tensor& a, const Tensor& b, Broadcast mode, F f) {
  const Tensor& big = mode == Broadcast::left_scalar ? b : a;
  Tensor out(big.shape());
  auto o = out.data();
  const std::size_t n = out.size();
  switch (mode) {
    case Broadcast::same:
      for (std::size_t i = 0; i < n; ++i) o[i] = f(a[i], b[i]);
      break;
    case Broadcast::right_scalar:
      for (std::size_t i = 0; i < n; ++i) o[i] = f(a[i], b[0]);
      break;
    case Broadcast::left_scalar:
      for (std::size_t i = 0; i < n; ++i) o[i] = f(a[0], b[i]);
      break;
  }
  return out;
}

// Accumulates per-element gradient contributions into a parent, reducing to
// a scalar when that parent was broadcast.
template <typename F>
void accumulate(detail::Node& parent, const Tensor& upstream, bool parent_is_scalar, F local) {
  if (!parent.requires_grad) return;
  Tensor& g = parent.ensure_grad();
  const std::size_t n = upstream.size();
  if (parent_is_scalar && n != 1) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += upstream[i] * local(i);
    g[0] += total;
  } else {
    for (std::size_t i = 0; i < n; ++i) g[i] += upstream[i] * local(i);
  }
}

template <typename Forward, typename Derivative>
Variable unary(const Variable& a, const char* op, Forward f, Derivative df) {
  require_defined(a, op);
  Tensor out(a.shape());
  const Tensor& x = a.value();
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  return make_result(std::move(out), {a.node()}, [df](detail::Node& self) {
    detail::Node& p = *self.parents[0];
    accumulate(p, self.grad, false, [&](std::size_t i) { return df(p.value[i], self.value[i]); });
  });
}

}  // namespace

Tensor& detail::Node::ensure_grad() {
  if (grad.shape() != value.shape()) grad = Tensor(value.shape(), 0.0);
  return grad;
}

Variable Variable::leaf(Tensor value, bool requires_grad) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  node->requires_grad = requires_grad;
  return from_node(std::move(node));
}

Variable Variable::from_node(std::shared_ptr<detail::Node> node) {
  Variable v;
  v.node_ = std::move(node);
  return v;
}

void Variable::zero_grad() {
  if (node_ && !node_->grad.empty()) node_->grad.fill(0.0);
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() noexcept { return g_grad_enabled; }

void backward(const Variable& loss) {
  require_defined(loss, "backward");
  if (loss.value().size() != 1) {
    throw ContractError("backward: loss must be a scalar, got shape " + shape_str(loss.shape()));
  }
  if (!loss.requires_grad()) return;

  // Post-order DFS gives a topological order (parents before children).
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack{{loss.node().get(), 0}};
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (detail::Node* node : order) {
    if (!node->is_leaf()) node->ensure_grad().fill(0.0);
  }
  loss.node()->ensure_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    if (!node->is_leaf() && node->backward_fn) node->backward_fn(*node);
  }
}

Variable matmul(const Variable& a, const Variable& b) {
  require_defined(a, "matmul");
  require_defined(b, "matmul");
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  if (a.value().cols() != b.value().rows()) {
    throw DimensionError("matmul: inner dimensions differ, " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  Tensor out({a.value().rows(), b.value().cols()});
  as_matrix(out).noalias() = as_matrix(a.value()) * as_matrix(b.value());
  return make_result(std::move(out), {a.node(), b.node()}, [](detail::Node& self) {
    detail::Node& pa = *self.parents[0];
    detail::Node& pb = *self.parents[1];
    if (pa.requires_grad) as_matrix(pa.ensure_grad()).noalias() += as_matrix(self.grad) * as_matrix(pb.value).transpose();
    if (pb.requires_grad) as_matrix(pb.ensure_grad()).noalias() += as_matrix(pa.value).transpose() * as_matrix(self.grad);
  });
}

Variable add(const Variable& a, const Variable& b) {
  const Broadcast mode = check_binary(a, b, "add");
  Tensor out = binary_map(a.value(), b.value(), mode, [](double x, double y) { return x + y; });
  return make_result(std::move(out), {a.node(), b.node()}, [mode](detail::Node& self) {
    accumulate(*self.parents[0], self.grad, mode == Broadcast::left_scalar, [](std::size_t) { return 1.0; });
    accumulate(*self.parents[1], self.grad, mode == Broadcast::right_scalar, [](std::size_t) { return 1.0; });
  });
}

Variable sub(const Variable& a, const Variable& b) {
  const Broadcast mode = check_binary(a, b, "sub");
  Tensor out = binary_map(a.value(), b.value(), mode, [](double x, double y) { return x - y; });
  return make_result(std::move(out), {a.node(), b.node()}, [mode](detail::Node& self) {
    accumulate(*self.parents[0], self.grad, mode == Broadcast::left_scalar, [](std::size_t) { return 1.0; });
    accumulate(*self.parents[1], self.grad, mode == Broadcast::right_scalar, [](std::size_t) { return -1.0; });
  });
}

Variable mul(const Variable& a, const Variable& b) {
  const Broadcast mode = check_binary(a, b, "mul");
  Tensor out = binary_map(a.value(), b.value(), mode, [](double x, double y) { return x * y; });
  return make_result(std::move(out), {a.node(), b.node()}, [mode](detail::Node& self) {
    const Tensor& av = self.parents[0]->value;
    const Tensor& bv = self.parents[1]->value;
    auto at = [](const Tensor& t, bool scalar_side, std::size_t i) { return scalar_side ? t[0] : t[i]; };
    accumulate(*self.parents[0], self.grad, mode == Broadcast::left_scalar,
               [&](std::size_t i) { return at(bv, mode == Broadcast::right_scalar, i); });
    accumulate(*self.parents[1], self.grad, mode == Broadcast::right_scalar,
               [&](std::size_t i) { return at(av, mode == Broadcast::left_scalar, i); });
  });
}

Variable scale(const Variable& a, double factor) {
  return unary(a, "scale", [factor](double x) { return factor * x; }, [factor](double, double) { return factor; });
}

Variable add_scalar(const Variable& a, double offset) {
  return unary(a, "add_scalar", [offset](double x) { return x + offset; }, [](double, double) { return 1.0; });
}

Variable relu(const Variable& a) {
  return unary(a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Variable sigmoid(const Variable& a) {
  return unary(
      a, "sigmoid",
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Variable exp(const Variable& a) {
  return unary(a, "exp", [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Variable log(const Variable& a) {
  require_defined(a, "log");
  for (double x : a.value().data()) {
    if (!(x > 0.0)) throw DomainError("log: nonpositive input " + std::to_string(x));
  }
  return unary(a, "log", [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Variable tanh(const Variable& a) {
  return unary(a, "tanh", [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Variable square(const Variable& a) {
  return unary(a, "square", [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Variable clamp(const Variable& a, double lo, double hi) {
  return unary(a, "clamp", [lo, hi](double x) { return std::clamp(x, lo, hi); },
               [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Variable add_row_vector(const Variable& x, const Variable& bias) {
  require_defined(x, "add_row_vector");
  require_defined(bias, "add_row_vector");
  require_matrix(x, "add_row_vector");
  require_matrix(bias, "add_row_vector");
  if (bias.value().rows() != 1 || bias.value().cols() != x.value().cols()) {
    throw DimensionError("add_row_vector: bias " + shape_str(bias.shape()) + " does not fit " + shape_str(x.shape()));
  }
  Tensor out = x.value();
  as_matrix(out).rowwise() += as_matrix(bias.value()).row(0);
  return make_result(std::move(out), {x.node(), bias.node()}, [](detail::Node& self) {
    detail::Node& px = *self.parents[0];
    detail::Node& pb = *self.parents[1];
    if (px.requires_grad) as_matrix(px.ensure_grad()) += as_matrix(self.grad);
    if (pb.requires_grad) as_matrix(pb.ensure_grad()).row(0) += as_matrix(self.grad).colwise().sum();
  });
}

Variable slice_cols(const Variable& a, std::size_t begin, std::size_t count) {
  require_defined(a, "slice_cols");
  require_matrix(a, "slice_cols");
  const std::size_t n = a.value().rows();
  const std::size_t k = a.value().cols();
  if (begin + count > k) {
    throw DimensionError("slice_cols: columns [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                         ") exceed " + shape_str(a.shape()));
  }
  Tensor out({n, count});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < count; ++c) out(r, c) = a.value()(r, begin + c);
  }
  return make_result(std::move(out), {a.node()}, [begin, count](detail::Node& self) {
    detail::Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    const std::size_t rows = self.value.rows();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < count; ++c) g(r, begin + c) += self.grad(r, c);
    }
  });
}

Variable row_sum(const Variable& a) {
  require_defined(a, "row_sum");
  require_matrix(a, "row_sum");
  Tensor out({a.value().rows(), 1});
  as_matrix(out).col(0) = as_matrix(a.value()).rowwise().sum();
  return make_result(std::move(out), {a.node()}, [](detail::Node& self) {
    detail::Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    as_matrix(p.ensure_grad()).colwise() += as_matrix(self.grad).col(0);
  });
}

Variable sum(const Variable& a) {
  require_defined(a, "sum");
  double total = 0.0;
  for (double x : a.value().data()) total += x;
  return make_result(Tensor::scalar(total), {a.node()}, [](detail::Node& self) {
    detail::Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    const double g = self.grad[0];
    for (double& v : p.ensure_grad().data()) v += g;
  });
}

Variable mean(const Variable& a) {
  require_defined(a, "mean");
  if (a.value().empty()) throw ContractError("mean: empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Tensor softmax(const Tensor& logits) {
  const std::size_t n = logits.rows();
  const std::size_t c = logits.cols();
  Tensor out({n, c});
  for (std::size_t r = 0; r < n; ++r) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j) m = std::max(m, logits(r, j));
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      out(r, j) = std::exp(logits(r, j) - m);
      z += out(r, j);
    }
    for (std::size_t j = 0; j < c; ++j) out(r, j) /= z;
  }
  return out;
}

Variable softmax_cross_entropy(const Variable& logits, std::span<const int> labels) {
  require_defined(logits, "softmax_cross_entropy");
  require_matrix(logits, "softmax_cross_entropy");
  const std::size_t n = logits.value().rows();
  const std::size_t c = logits.value().cols();
  if (labels.size() != n) {
    throw DimensionError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for logits " +
                         shape_str(logits.shape()));
  }
  if (n == 0) throw ContractError("softmax_cross_entropy: empty batch");
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      throw IndexError("softmax_cross_entropy: label " + std::to_string(y) + " outside [0, " + std::to_string(c) + ")");
    }
  }
  Tensor probs = softmax(logits.value());
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t y = static_cast<std::size_t>(labels[r]);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j) m = std::max(m, logits.value()(r, j));
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(logits.value()(r, j) - m);
    loss += std::log(z) + m - logits.value()(r, y);
  }
  loss /= static_cast<double>(n);
  std::vector<int> owned(labels.begin(), labels.end());
  return make_result(Tensor::scalar(loss), {logits.node()},
                     [probs = std::move(probs), owned = std::move(owned)](detail::Node& self) {
                       detail::Node& p = *self.parents[0];
                       if (!p.requires_grad) return;
                       Tensor& g = p.ensure_grad();
                       const std::size_t rows = probs.rows();
                       const std::size_t cols = probs.cols();
                       const double coeff = self.grad[0] / static_cast<double>(rows);
                       for (std::size_t r = 0; r < rows; ++r) {
                         for (std::size_t j = 0; j < cols; ++j) {
                           const double onehot = static_cast<int>(j) == owned[r] ? 1.0 : 0.0;
                           g(r, j) += coeff * (probs(r, j) - onehot);
                         }
                       }
                     });
}

}  // namespace daal
