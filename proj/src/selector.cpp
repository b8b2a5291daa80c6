#include "daal/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "daal/error.hpp"
#include "daal/oracle.hpp"
#include "daal/rng.hpp"

namespace daal {

namespace {

// Orders candidate pool indices by descending key, then ascending pool id.
std::vector<std::size_t> top_k(const Pool& pool, std::vector<std::pair<double, std::size_t>> keyed, std::size_t k) {
  const auto better = [&pool](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return pool.ids[a.second] < pool.ids[b.second];
  };
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(k), keyed.end(), better);
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = keyed[i].second;
  return out;
}

void ensure_budget(const Pool& pool, std::size_t candidates, std::size_t k) {
  if (k > candidates) {
    throw BudgetExhaustedError("requested " + std::to_string(k) + " queries but only " + std::to_string(candidates) +
                               " unqueried samples remain (pool size " + std::to_string(pool.size()) + ")");
  }
}

std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> candidates, std::size_t k, Rng& rng) {
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(k);
  return candidates;
}

}  // namespace

double ScoreBreakdown::phi() const { return std::exp(log_phi); }

std::vector<ScoreBreakdown> daal_scores(std::span<const double> phi_b, std::span<const double> q, double beta,
                                        std::span<const std::size_t> pool_indices) {
  if (phi_b.size() != q.size() || (!pool_indices.empty() && pool_indices.size() != phi_b.size())) {
    throw DimensionError("daal_scores: phi_b, q and index vectors differ in length");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ContractError("daal_scores: beta must be finite and >= 0");
  std::vector<ScoreBreakdown> out(phi_b.size());
  for (std::size_t i = 0; i < phi_b.size(); ++i) {
    if (!(phi_b[i] >= 0.0)) throw ContractError("daal_scores: negative base score " + std::to_string(phi_b[i]));
    if (!(q[i] > 0.0 && q[i] < 1.0)) throw ContractError("daal_scores: q outside (0, 1): " + std::to_string(q[i]));
    ScoreBreakdown& s = out[i];
    s.pool_index = pool_indices.empty() ? i : pool_indices[i];
    s.phi_b = phi_b[i];
    s.q = q[i];
    s.beta = beta;
    // beta * log q is exactly 0 for beta == 0, so the ranking reduces to phi_b.
    const double log_base = phi_b[i] > 0.0 ? std::log(phi_b[i]) : -std::numeric_limits<double>::infinity();
    s.log_phi = beta == 0.0 ? log_base : log_base + beta * std::log(q[i]);
  }
  return out;
}

std::vector<std::size_t> select_batch(Pool& pool, std::span<const ScoreBreakdown> scores, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(scores.size());
  std::set<std::size_t> seen;
  for (const auto& s : scores) {
    if (s.pool_index >= pool.size()) throw IndexError("select_batch: pool index out of range");
    if (pool.queried[s.pool_index] || !seen.insert(s.pool_index).second) continue;
    keyed.emplace_back(s.log_phi, s.pool_index);
  }
  ensure_budget(pool, std::min(keyed.size(), pool.unqueried_count()), k);
  auto chosen = top_k(pool, std::move(keyed), k);
  for (std::size_t idx : chosen) pool.queried[idx] = 1;
  return chosen;
}

std::vector<std::size_t> select_by_uncertainty(Pool& pool, std::span<const std::size_t> pool_indices,
                                               std::span<const double> phi_b, std::size_t k) {
  if (pool_indices.size() != phi_b.size()) throw DimensionError("select_by_uncertainty: length mismatch");
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(phi_b.size());
  for (std::size_t i = 0; i < phi_b.size(); ++i) {
    if (!pool.queried.at(pool_indices[i])) keyed.emplace_back(phi_b[i], pool_indices[i]);
  }
  ensure_budget(pool, keyed.size(), k);
  auto chosen = top_k(pool, std::move(keyed), k);
  for (std::size_t idx : chosen) pool.queried[idx] = 1;
  return chosen;
}

void BetaSchedule::validate() const {
  if (!(beta0 >= 0.0) || !std::isfinite(beta0)) throw ContractError("beta schedule: beta0 must be finite and >= 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractError("beta schedule: alpha must lie in (0, 1]");
  if (!(floor >= 0.0)) throw ContractError("beta schedule: floor must be >= 0");
}

double anneal(const BetaSchedule& schedule, std::size_t cycle) {
  schedule.validate();
  return std::max(schedule.floor, schedule.beta0 * std::pow(schedule.alpha, static_cast<double>(cycle)));
}

InitialSet initial_set(Pool& pool, Oracle& oracle, const InitStrategy& strategy, std::size_t num_classes,
                       std::uint64_t seed) {
  Rng rng(seed);
  InitialSet result;
  std::vector<std::size_t> chosen;

  auto inliers_of = [&pool](int cls) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!pool.queried[i] && pool.true_labels[i] == cls) out.push_back(i);
    }
    return out;
  };

  if (const auto* balanced = std::get_if<init::Balanced>(&strategy)) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      auto candidates = inliers_of(static_cast<int>(c));
      if (candidates.size() < balanced->per_class) {
        throw ContractError("initial_set: class " + std::to_string(c) + " has only " + std::to_string(candidates.size()) +
                            " samples, need " + std::to_string(balanced->per_class));
      }
      auto picked = sample_without_replacement(std::move(candidates), balanced->per_class, rng);
      chosen.insert(chosen.end(), picked.begin(), picked.end());
    }
  } else if (const auto* biased = std::get_if<init::Biased>(&strategy)) {
    if (biased->classes.empty()) throw ContractError("initial_set: biased class subset is empty");
    std::vector<std::size_t> candidates;
    for (int c : biased->classes) {
      if (c < 0 || static_cast<std::size_t>(c) >= num_classes) {
        throw ContractError("initial_set: biased class " + std::to_string(c) + " out of range");
      }
      auto part = inliers_of(c);
      candidates.insert(candidates.end(), part.begin(), part.end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (candidates.size() < biased->count) {
      throw ContractError("initial_set: biased subset holds " + std::to_string(candidates.size()) + " samples, need " +
                          std::to_string(biased->count));
    }
    chosen = sample_without_replacement(std::move(candidates), biased->count, rng);
  } else {
    const auto& beta = std::get<init::Beta>(strategy);
    if (beta.teacher == nullptr || beta.calibration == nullptr) {
      throw ContractError("initial_set: beta strategy needs a calibrated teacher");
    }
    const auto candidates = pool.unqueried_indices();
    ensure_budget(pool, candidates.size(), beta.count);
    // density_score is a monotone map of the ELBO; ranking on the ELBO itself
    // avoids ties where the sigmoid saturates.
    const auto e = elbo(*beta.teacher, pool.features.select_rows(candidates));
    std::vector<std::pair<double, std::size_t>> keyed;
    keyed.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) keyed.emplace_back(e[i], candidates[i]);
    chosen = top_k(pool, std::move(keyed), beta.count);
  }

  for (std::size_t idx : chosen) pool.queried[idx] = 1;
  const auto answers = oracle.answer(chosen);
  result.rejected = extend_labeled(result.labeled, pool, answers, LabeledSet::kInitialOrigin);
  result.queried = std::move(chosen);
  return result;
}

}  // namespace daal
