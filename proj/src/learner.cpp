#include "daal/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "daal/binary_io.hpp"
#include "daal/error.hpp"
#include "daal/rng.hpp"

namespace daal {

namespace {

constexpr std::string_view kClassifierMagic = "DAALCLS1";
const std::string kPrefix = "fc.";

void check_features(const ClassifierModel& model, const Tensor& x, const char* op) {
  if (x.rank() != 2 || x.cols() != model.feature_dim()) {
    throw ContractError(std::string(op) + ": model expects " + std::to_string(model.feature_dim()) +
                        " features, input has shape " + shape_str(x.shape()));
  }
}

}  // namespace

void LabeledSet::append(std::span<const double> x, int label, int origin, long pool_id) {
  if (features.cols() == 0 && features.rows() == 0) {
    features = Tensor({0, x.size()});
  } else if (x.size() != features.cols()) {
    throw DimensionError("labeled set has " + std::to_string(features.cols()) + " features, sample has " +
                         std::to_string(x.size()));
  }
  auto& storage = features.storage();
  storage.insert(storage.end(), x.begin(), x.end());
  features = Tensor({features.rows() + 1, x.size()}, std::move(storage));
  labels.push_back(label);
  origin_cycle.push_back(origin);
  pool_ids.push_back(pool_id);
}

ClassifierModel::ClassifierModel(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw ContractError("classifier needs at least input and output widths");
  if (widths_.back() < 2) throw ContractError("classifier needs at least two classes");
  for (std::size_t w : widths_) {
    if (w == 0) throw ContractError("classifier layer widths must be positive");
  }
  register_dense_stack(params_, kPrefix, widths_);
}

void ClassifierModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  init_dense_stack(params_, kPrefix, widths_, rng);
  params_.reset_optimizer();
  params_.zero_grad();
}

Variable ClassifierModel::logits(const Variable& x) const {
  return dense_forward(params_, kPrefix, widths_, x, Activation::relu);
}

std::vector<double> train(ClassifierModel& model, const LabeledSet& data, const ClassifierTrainOptions& options) {
  if (data.empty()) throw ContractError("train: labeled set is empty");
  check_features(model, data.features, "train");
  for (int y : data.labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= model.num_classes()) {
      throw ContractError("train: label " + std::to_string(y) + " outside [0, " + std::to_string(model.num_classes()) + ")");
    }
  }
  model.initialize(derive_seed(options.seed, 0));
  Rng shuffle_rng(derive_seed(options.seed, 1));

  const std::size_t n = data.size();
  const std::size_t batch = std::max<std::size_t>(1, std::min(options.batch_size, n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> batch_labels;
  std::vector<double> log;
  log.reserve(options.epochs);
  const Adam rule{.lr = options.lr};

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      std::span<const std::size_t> idx(order.data() + start, stop - start);
      batch_labels.clear();
      for (std::size_t i : idx) batch_labels.push_back(data.labels[i]);
      Variable x = Variable::constant(data.features.select_rows(idx));
      Variable loss = softmax_cross_entropy(model.logits(x), batch_labels);
      model.params().zero_grad();
      backward(loss);
      step(model.params(), rule);
      total += loss.value().item() * static_cast<double>(idx.size());
    }
    log.push_back(total / static_cast<double>(n));
  }
  return log;
}

Tensor predict_proba(const ClassifierModel& model, const Tensor& x) {
  check_features(model, x, "predict_proba");
  NoGradGuard guard;
  return softmax(model.logits(Variable::constant(x)).value());
}

std::vector<int> predict(const ClassifierModel& model, const Tensor& x) {
  const Tensor probs = predict_proba(model, x);
  std::vector<int> out(probs.rows());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    const auto row = probs.row(r);
    out[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

std::vector<double> entropy_of_rows(const Tensor& probs) {
  std::vector<double> out(probs.rows(), 0.0);
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    double h = 0.0;
    for (double p : probs.row(r)) {
      if (p > 0.0) h -= p * std::log(p);
    }
    out[r] = std::max(0.0, h);
  }
  return out;
}

std::vector<double> entropy_scores(const ClassifierModel& model, const Tensor& x) {
  return entropy_of_rows(predict_proba(model, x));
}

double accuracy(const ClassifierModel& model, const Tensor& x, std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  const auto pred = predict(model, x);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += pred[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

void save_classifier(const ClassifierModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  io::write_magic(out, kClassifierMagic);
  io::write_u32_le(out, static_cast<std::uint32_t>(model.widths().size()));
  for (std::size_t w : model.widths()) io::write_u32_le(out, static_cast<std::uint32_t>(w));
  io::write_f64_le(out, model.params().flatten());
}

ClassifierModel load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  io::expect_magic(in, kClassifierMagic);
  const std::uint32_t layers = io::read_u32_le(in);
  if (layers < 2 || layers > 64) throw FormatError("implausible classifier layer count " + std::to_string(layers));
  std::vector<std::size_t> widths(layers);
  for (auto& w : widths) w = io::read_u32_le(in);
  ClassifierModel model(widths);
  std::vector<double> values(model.params().total_values());
  for (double& v : values) v = io::read_f64_le(in);
  model.params().assign(values);
  return model;
}

}  // namespace daal
