#include "daal/pool.hpp"

#include <algorithm>
#include <unordered_set>

#include "daal/error.hpp"

namespace daal {

std::size_t Pool::outlier_count() const {
  return static_cast<std::size_t>(std::count(true_labels.begin(), true_labels.end(), kOutlierLabel));
}

std::vector<std::size_t> Pool::unqueried_indices() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (!queried[i]) out.push_back(i);
  }
  return out;
}

std::size_t Pool::unqueried_count() const {
  return static_cast<std::size_t>(std::count(queried.begin(), queried.end(), std::uint8_t{0}));
}

void Pool::validate() const {
  const std::size_t n = ids.size();
  if (features.rows() != n || true_labels.size() != n || queried.size() != n) {
    throw ContractError("pool components disagree in size");
  }
  std::unordered_set<long> seen;
  for (long id : ids) {
    if (!seen.insert(id).second) throw ContractError("duplicate pool id " + std::to_string(id));
  }
}

Pool make_pool(Tensor features, std::vector<int> labels, std::vector<long> ids) {
  Pool pool;
  pool.features = std::move(features);
  pool.true_labels = std::move(labels);
  pool.ids = std::move(ids);
  pool.queried.assign(pool.ids.size(), 0);
  pool.validate();
  return pool;
}

}  // namespace daal
