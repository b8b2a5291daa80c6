#pragma once

// Finite-difference gradient error for every differentiable op on random
// inputs; shared by the numerics suite and the acceptance binary.

#include <string>
#include <utility>
#include <vector>

#include "support/gradcheck.hpp"

namespace daal::testing {

inline Variable leaf(Tensor t) { return Variable::leaf(std::move(t)); }

// Weighted sum so every output entry gets a distinct upstream gradient.
inline Variable weighted_sum(const Variable& y) {
  Tensor w(y.shape());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.3 + 0.17 * static_cast<double>(i % 7);
  return sum(mul(y, Variable::constant(std::move(w))));
}

struct OpCase {
  std::string name;
  double max_rel_error;
};

inline std::vector<OpCase> op_gradient_errors(Rng& rng) {
  using V = std::vector<Variable>;
  std::vector<OpCase> out;
  const auto unary = [&](const char* name, Tensor x, Variable (*op)(const Variable&)) {
    out.push_back({name, max_grad_error({leaf(std::move(x))}, [op](const V& v) { return weighted_sum(op(v[0])); })});
  };
  const auto binary = [&](const char* name, Tensor a, Tensor b, Variable (*op)(const Variable&, const Variable&)) {
    out.push_back({name, max_grad_error({leaf(std::move(a)), leaf(std::move(b))},
                                        [op](const V& v) { return weighted_sum(op(v[0], v[1])); })});
  };
  binary("matmul", random_tensor({3, 4}, rng), random_tensor({4, 2}, rng), matmul);
  binary("add", random_tensor({2, 3}, rng), random_tensor({2, 3}, rng), add);
  binary("sub", random_tensor({2, 3}, rng), random_tensor({2, 3}, rng), sub);
  binary("mul", random_tensor({2, 3}, rng), random_tensor({2, 3}, rng), mul);
  binary("mul by scalar", random_tensor({2, 3}, rng), random_tensor({}, rng), mul);
  binary("add_row_vector", random_tensor({4, 3}, rng), random_tensor({1, 3}, rng), add_row_vector);
  out.push_back({"scale", max_grad_error({leaf(random_tensor({2, 3}, rng))},
                                         [](const V& v) { return weighted_sum(scale(v[0], -1.7)); })});
  out.push_back({"add_scalar", max_grad_error({leaf(random_tensor({2, 3}, rng))},
                                              [](const V& v) { return weighted_sum(add_scalar(v[0], 0.4)); })});
  unary("relu", away_from_zero({3, 3}, rng), relu);
  unary("sigmoid", random_tensor({3, 3}, rng, -3, 3), sigmoid);
  unary("exp", random_tensor({3, 3}, rng), exp);
  unary("log", random_tensor({3, 3}, rng, 0.2, 2.0), log);
  unary("tanh", random_tensor({3, 3}, rng, -2, 2), tanh);
  unary("square", random_tensor({3, 3}, rng), square);
  {
    // Keep entries clear of the clamp edges at +-0.5.
    Tensor x = away_from_zero({3, 3}, rng, 0.1, 0.4);
    for (std::size_t i = 0; i < x.size(); i += 2) x[i] = x[i] > 0 ? x[i] + 0.6 : x[i] - 0.6;
    out.push_back({"clamp", max_grad_error({leaf(std::move(x))},
                                           [](const V& v) { return weighted_sum(clamp(v[0], -0.5, 0.5)); })});
  }
  out.push_back({"slice_cols", max_grad_error({leaf(random_tensor({3, 5}, rng))},
                                              [](const V& v) { return weighted_sum(slice_cols(v[0], 1, 3)); })});
  unary("row_sum", random_tensor({3, 4}, rng), row_sum);
  out.push_back({"sum", max_grad_error({leaf(random_tensor({3, 4}, rng))},
                                       [](const V& v) { return sum(square(v[0])); })});
  out.push_back({"mean", max_grad_error({leaf(random_tensor({3, 4}, rng))},
                                        [](const V& v) { return mean(square(v[0])); })});
  const std::vector<int> labels{0, 2, 1, 2};
  out.push_back({"softmax_cross_entropy",
                 max_grad_error({leaf(random_tensor({4, 3}, rng, -2, 2))},
                                [&labels](const V& v) { return softmax_cross_entropy(v[0], labels); })});
  return out;
}

}  // namespace daal::testing
