#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "daal/learner.hpp"
#include "daal/pool.hpp"

namespace daal {

struct OracleAnswer {
  std::size_t pool_index = 0;
  std::optional<int> label;  // empty: REJECT (outlier)

  bool rejected() const noexcept { return !label.has_value(); }
};

// Simulated annotator. Every request consumes budget; outliers are refused.
// Asking about the same sample twice is a contract violation.
class Oracle {
 public:
  explicit Oracle(const Pool& pool);

  std::vector<OracleAnswer> answer(std::span<const std::size_t> pool_indices);

  std::size_t answered() const noexcept { return answered_count_; }
  std::size_t rejected() const noexcept { return rejected_count_; }
  bool was_answered(std::size_t pool_index) const { return answered_.at(pool_index) != 0; }

 private:
  const Pool* pool_;
  std::vector<std::uint8_t> answered_;
  std::size_t answered_count_ = 0;
  std::size_t rejected_count_ = 0;
};

// Appends accepted answers to the labeled set; returns the number rejected.
std::size_t extend_labeled(LabeledSet& labeled, const Pool& pool, std::span<const OracleAnswer> answers, int cycle);

}  // namespace daal
