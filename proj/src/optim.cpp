#include "daal/optim.hpp"

#include <cmath>

#include "daal/error.hpp"

namespace daal {

Variable ParamStore::add(std::string name, Tensor init) {
  if (index_.contains(name)) throw ContractError("parameter '" + name + "' already registered");
  index_.emplace(name, entries_.size());
  Entry entry{std::move(name), Variable::leaf(std::move(init), true), {}, {}};
  entries_.push_back(std::move(entry));
  return entries_.back().param;
}

const Variable& ParamStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter '" + name + "'");
  return entries_[it->second].param;
}

std::size_t ParamStore::total_values() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.param.value().size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& e : entries_) e.param.mutable_grad().fill(0.0);
}

void ParamStore::reset_optimizer() {
  for (auto& e : entries_) {
    e.first_moment = Tensor();
    e.second_moment = Tensor();
  }
  steps_ = 0;
}

std::vector<double> ParamStore::flatten() const {
  std::vector<double> out;
  out.reserve(total_values());
  for (const auto& e : entries_) out.insert(out.end(), e.param.value().data().begin(), e.param.value().data().end());
  return out;
}

void ParamStore::assign(std::span<const double> values) {
  if (values.size() != total_values()) {
    throw DimensionError("parameter assignment expects " + std::to_string(total_values()) + " values, got " +
                         std::to_string(values.size()));
  }
  std::size_t offset = 0;
  for (auto& e : entries_) {
    auto dst = e.param.mutable_value().data();
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), dst.size(), dst.begin());
    offset += dst.size();
  }
}

void step(ParamStore& store, const UpdateRule& rule) {
  for (const auto& e : store.entries_) {
    if (!e.param.has_grad()) throw ContractError("step: parameter '" + e.name + "' has no gradient");
  }
  ++store.steps_;
  if (const auto* sgd = std::get_if<Sgd>(&rule)) {
    for (auto& e : store.entries_) {
      auto w = e.param.mutable_value().data();
      const auto g = e.param.grad().data();
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= sgd->lr * g[i];
    }
    return;
  }
  const auto& adam = std::get<Adam>(rule);
  const double t = static_cast<double>(store.steps_);
  const double correction1 = 1.0 - std::pow(adam.beta1, t);
  const double correction2 = 1.0 - std::pow(adam.beta2, t);
  for (auto& e : store.entries_) {
    auto w = e.param.mutable_value().data();
    const auto g = e.param.grad().data();
    if (e.first_moment.shape() != e.param.shape()) {
      e.first_moment = Tensor(e.param.shape(), 0.0);
      e.second_moment = Tensor(e.param.shape(), 0.0);
    }
    auto m = e.first_moment.data();
    auto v = e.second_moment.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g[i];
      v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= adam.lr * m_hat / (std::sqrt(v_hat) + adam.eps);
    }
  }
}

}  // namespace daal
