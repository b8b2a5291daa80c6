#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "daal/tensor.hpp"

namespace daal {

inline constexpr int kOutlierLabel = -1;

// Unlabeled candidate set D_u. Labels are hidden ground truth used only by
// the simulated oracle; kOutlierLabel marks samples with no valid class.
struct Pool {
  Tensor features{Shape{0, 0}};
  std::vector<int> true_labels;
  std::vector<long> ids;
  std::vector<std::uint8_t> queried;

  std::size_t size() const noexcept { return ids.size(); }
  bool is_outlier(std::size_t index) const { return true_labels.at(index) == kOutlierLabel; }
  std::size_t outlier_count() const;

  std::vector<std::size_t> unqueried_indices() const;
  std::size_t unqueried_count() const;

  // Throws ContractError when sizes disagree.
  void validate() const;
};

Pool make_pool(Tensor features, std::vector<int> labels, std::vector<long> ids);

}  // namespace daal
