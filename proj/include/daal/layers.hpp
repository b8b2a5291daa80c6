#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "daal/optim.hpp"
#include "daal/rng.hpp"

namespace daal {

enum class Activation { relu, tanh };

// Fully connected stack: widths {in, h1, ..., out}. Parameters are registered
// as "<prefix>W<i>" [in_i × out_i] and "<prefix>b<i>" [1 × out_i].
void register_dense_stack(ParamStore& store, const std::string& prefix, const std::vector<std::size_t>& widths);

// Glorot-uniform weights, zero biases.
void init_dense_stack(ParamStore& store, const std::string& prefix, const std::vector<std::size_t>& widths, Rng& rng);

// Hidden layers use `hidden`; the last layer is affine.
Variable dense_forward(const ParamStore& store, const std::string& prefix, const std::vector<std::size_t>& widths,
                       const Variable& x, Activation hidden);

}  // namespace daal
