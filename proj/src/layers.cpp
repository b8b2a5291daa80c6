#include "daal/layers.hpp"

#include <cmath>

namespace daal {

void register_dense_stack(ParamStore& store, const std::string& prefix, const std::vector<std::size_t>& widths) {
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    store.add(prefix + "W" + std::to_string(i), Tensor({widths[i], widths[i + 1]}, 0.0));
    store.add(prefix + "b" + std::to_string(i), Tensor({1, widths[i + 1]}, 0.0));
  }
}

void init_dense_stack(ParamStore& store, const std::string& prefix, const std::vector<std::size_t>& widths, Rng& rng) {
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const double limit = std::sqrt(6.0 / static_cast<double>(widths[i] + widths[i + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Variable w = store.get(prefix + "W" + std::to_string(i));
    for (double& v : w.mutable_value().data()) v = dist(rng);
    Variable b = store.get(prefix + "b" + std::to_string(i));
    b.mutable_value().fill(0.0);
  }
}

Variable dense_forward(const ParamStore& store, const std::string& prefix, const std::vector<std::size_t>& widths,
                       const Variable& x, Activation hidden) {
  Variable h = x;
  const std::size_t layers = widths.size() - 1;
  for (std::size_t i = 0; i < layers; ++i) {
    h = add_row_vector(matmul(h, store.get(prefix + "W" + std::to_string(i))), store.get(prefix + "b" + std::to_string(i)));
    if (i + 1 < layers) h = hidden == Activation::relu ? relu(h) : tanh(h);
  }
  return h;
}

}  // namespace daal
