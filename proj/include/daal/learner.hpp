#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "daal/layers.hpp"
#include "daal/optim.hpp"
#include "daal/tensor.hpp"

namespace daal {

// Labeled training data D_l. `origin_cycle` records where each row came from:
// kInitialOrigin for the initial set, otherwise the AL cycle that queried it.
struct LabeledSet {
  static constexpr int kInitialOrigin = -1;

  Tensor features{Shape{0, 0}};
  std::vector<int> labels;
  std::vector<int> origin_cycle;
  std::vector<long> pool_ids;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  void append(std::span<const double> x, int label, int origin, long pool_id);
};

// MLP classifier Q(y|x; theta) with ReLU hidden layers and softmax output.
class ClassifierModel {
 public:
  explicit ClassifierModel(std::vector<std::size_t> widths);

  const std::vector<std::size_t>& widths() const noexcept { return widths_; }
  std::size_t feature_dim() const noexcept { return widths_.front(); }
  std::size_t num_classes() const noexcept { return widths_.back(); }

  ParamStore& params() noexcept { return params_; }
  const ParamStore& params() const noexcept { return params_; }

  // Fresh seeded initialization; also clears optimizer state.
  void initialize(std::uint64_t seed);
  Variable logits(const Variable& x) const;

 private:
  std::vector<std::size_t> widths_;
  ParamStore params_;
};

struct ClassifierTrainOptions {
  std::size_t epochs = 200;
  double lr = 0.01;
  std::size_t batch_size = 32;  // effective batch is min(batch_size, n)
  std::uint64_t seed = 0;
};

// Re-initializes from the seed, then runs Adam over shuffled minibatches.
// Returns the mean training loss of each epoch.
std::vector<double> train(ClassifierModel& model, const LabeledSet& data, const ClassifierTrainOptions& options);

Tensor predict_proba(const ClassifierModel& model, const Tensor& x);
std::vector<int> predict(const ClassifierModel& model, const Tensor& x);

// Shannon entropy in nats of each probability row, with 0 log 0 = 0.
std::vector<double> entropy_of_rows(const Tensor& probs);
std::vector<double> entropy_scores(const ClassifierModel& model, const Tensor& x);

double accuracy(const ClassifierModel& model, const Tensor& x, std::span<const int> labels);

void save_classifier(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_classifier(const std::filesystem::path& path);

}  // namespace daal
