#include "daal/oracle.hpp"

#include "daal/error.hpp"

namespace daal {

Oracle::Oracle(const Pool& pool) : pool_(&pool), answered_(pool.size(), 0) {}

std::vector<OracleAnswer> Oracle::answer(std::span<const std::size_t> pool_indices) {
  for (std::size_t i = 0; i < pool_indices.size(); ++i) {
    const std::size_t idx = pool_indices[i];
    if (idx >= answered_.size()) throw IndexError("oracle: pool index " + std::to_string(idx) + " out of range");
    if (answered_[idx]) {
      throw ContractError("oracle: pool id " + std::to_string(pool_->ids[idx]) + " was already queried");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (pool_indices[j] == idx) throw ContractError("oracle: pool id " + std::to_string(pool_->ids[idx]) + " requested twice");
    }
  }
  std::vector<OracleAnswer> out;
  out.reserve(pool_indices.size());
  for (std::size_t idx : pool_indices) {
    answered_[idx] = 1;
    ++answered_count_;
    if (pool_->is_outlier(idx)) {
      ++rejected_count_;
      out.push_back({idx, std::nullopt});
    } else {
      out.push_back({idx, pool_->true_labels[idx]});
    }
  }
  return out;
}

std::size_t extend_labeled(LabeledSet& labeled, const Pool& pool, std::span<const OracleAnswer> answers, int cycle) {
  std::size_t rejected = 0;
  for (const auto& a : answers) {
    if (a.rejected()) {
      ++rejected;
      continue;
    }
    labeled.append(pool.features.row(a.pool_index), *a.label, cycle, pool.ids[a.pool_index]);
  }
  return rejected;
}

}  // namespace daal
