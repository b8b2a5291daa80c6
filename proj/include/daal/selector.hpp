#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "daal/learner.hpp"
#include "daal/pool.hpp"
#include "daal/teacher.hpp"

namespace daal {

class Oracle;

// One evaluation of Phi(x) = phi_b(x) * q(x)^beta, kept in the log domain.
struct ScoreBreakdown {
  std::size_t pool_index = 0;
  double phi_b = 0.0;
  double q = 0.5;
  double beta = 0.0;
  double log_phi = 0.0;  // -inf when phi_b == 0

  double phi() const;
};

// `pool_indices` labels each entry; when empty, entries are numbered 0..m-1.
// Requires phi_b >= 0, q in (0, 1), beta >= 0.
std::vector<ScoreBreakdown> daal_scores(std::span<const double> phi_b, std::span<const double> q, double beta,
                                        std::span<const std::size_t> pool_indices = {});

// Picks the k unqueried entries with the largest log_phi (ties: smaller pool
// id first) and marks them queried. Throws BudgetExhaustedError when fewer
// than k unqueried samples remain.
std::vector<std::size_t> select_batch(Pool& pool, std::span<const ScoreBreakdown> scores, std::size_t k);

// Plain uncertainty sampling: top-k by phi_b under the same tie rule.
std::vector<std::size_t> select_by_uncertainty(Pool& pool, std::span<const std::size_t> pool_indices,
                                               std::span<const double> phi_b, std::size_t k);

struct BetaSchedule {
  double beta0 = 0.0;
  double alpha = 1.0;  // in (0, 1]
  double floor = 0.0;

  void validate() const;
};

// max(floor, beta0 * alpha^t)
double anneal(const BetaSchedule& schedule, std::size_t cycle);

namespace init {

struct Balanced {
  std::size_t per_class = 1;
};

// Draws only from a proper subset of the classes.
struct Biased {
  std::vector<int> classes;
  std::size_t count = 32;
};

// The `count` samples with highest teacher density score.
struct Beta {
  std::size_t count = 32;
  const VaeModel* teacher = nullptr;
  const DensityCalibration* calibration = nullptr;
};

}  // namespace init

using InitStrategy = std::variant<init::Balanced, init::Biased, init::Beta>;

struct InitialSet {
  LabeledSet labeled;
  std::vector<std::size_t> queried;  // pool indices in selection order
  std::size_t rejected = 0;           // outliers the oracle refused
};

// Builds D_l for cycle 0. Balanced/biased model an oracle that picks inliers
// by label; beta uses only the teacher, so outliers can be picked and are
// then rejected by the oracle.
InitialSet initial_set(Pool& pool, Oracle& oracle, const InitStrategy& strategy, std::size_t num_classes,
                       std::uint64_t seed);

}  // namespace daal
