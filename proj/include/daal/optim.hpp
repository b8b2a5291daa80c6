#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "daal/autograd.hpp"

namespace daal {

struct Sgd {
  double lr = 0.01;
};

struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

using UpdateRule = std::variant<Sgd, Adam>;

// Named trainable parameters in declaration order, plus the optimizer's
// per-parameter moment buffers.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Variable param;
    Tensor first_moment;
    Tensor second_moment;
  };

  Variable add(std::string name, Tensor init);
  const Variable& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.contains(name); }

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t total_values() const;

  void zero_grad();
  // Clears moment buffers and the step counter.
  void reset_optimizer();
  long step_count() const noexcept { return steps_; }

  // Flat copy of all parameter values in declaration order.
  std::vector<double> flatten() const;
  void assign(std::span<const double> values);

 private:
  friend void step(ParamStore& store, const UpdateRule& rule);

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  long steps_ = 0;
};

// Applies one update to every parameter from its accumulated gradient.
void step(ParamStore& store, const UpdateRule& rule);

}  // namespace daal
