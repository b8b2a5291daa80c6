#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "daal/config.hpp"
#include "daal/datasets.hpp"
#include "daal/learner.hpp"
#include "daal/teacher.hpp"

namespace daal {

struct CycleMetrics {
  std::size_t cycle = 0;
  double beta = 0.0;
  double test_accuracy = 0.0;
  std::size_t cumulative_labeled = 0;
  std::size_t outlier_queries = 0;  // this cycle
  std::size_t cumulative_outlier_queries = 0;
  double wall_time_s = 0.0;
};

// One queried sample as seen in the teacher's latent space.
struct LatentRecord {
  std::size_t cycle = 0;
  long pool_id = 0;
  double z1 = 0.0;
  double z2 = 0.0;
  int pred_before = -1;
  int pred_after = -1;  // -1 when no later model exists
  int true_label = kOutlierLabel;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<CycleMetrics> cycles;  // cycle 0 = after training on the initial set
  LabeledSet final_labeled;
  std::vector<long> initial_ids;              // pool ids asked during initialization
  std::vector<std::vector<long>> queried_ids;  // pool ids asked in each cycle
  std::size_t initial_rejects = 0;
  bool truncated = false;  // pool ran out before num_cycles
};

// Splits plus the frozen, calibrated teacher for one seed. Shared by every
// method compared on that seed.
struct PreparedWorld {
  DatasetSplit split;
  VaeModel teacher;
  DensityCalibration calibration;
  std::vector<double> teacher_log;
};

// Data splits for a seed (stream 1 of the seed); no teacher training.
DatasetSplit build_split(const ALConfig& config, std::uint64_t seed);
PreparedWorld prepare_world(const ALConfig& config, std::uint64_t seed);

struct RunHooks {
  std::ostream* score_dump = nullptr;            // CSV rows, header written by caller
  std::vector<LatentRecord>* latent = nullptr;   // filled when non-null
};

RunResult run_prepared(const ALConfig& config, const PreparedWorld& world, std::uint64_t seed, const RunHooks& hooks = {});
RunResult run_once(const ALConfig& config, std::uint64_t seed);

struct AggregateRow {
  std::size_t cycle = 0;
  std::size_t runs = 0;
  double mean_acc = 0.0;
  double std_acc = 0.0;  // sample standard deviation; 0 for a single run
  double mean_outliers = 0.0;  // cumulative outlier queries
  double std_outliers = 0.0;
};

struct RepeatedResult {
  std::vector<RunResult> runs;
  std::vector<AggregateRow> aggregate;
};

std::vector<AggregateRow> aggregate(const std::vector<RunResult>& runs);

// Seeds base_seed + r for r in [0, runs).
RepeatedResult run_repeated(const ALConfig& config, std::size_t runs);

struct Comparison {
  RepeatedResult first;
  RepeatedResult second;
};

// Runs both configs on identical seeds; worlds are shared when both configs
// describe the same data and teacher.
Comparison compare(const ALConfig& first, const ALConfig& second, std::size_t runs);

}  // namespace daal
