#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "daal/pool.hpp"
#include "daal/teacher.hpp"
#include "daal/tensor.hpp"

namespace daal {

// Two-class 2-D toy world: each class is an equal-weight mixture of
// isotropic Gaussians, contaminated by uniform outliers on an expanded
// bounding box. Mixture weights are (1 - outlier_fraction, outlier_fraction).
struct ToySpec {
  std::size_t modes_per_class = 2;
  // Mode centers, class-major: modes_per_class entries for class 0, then class 1.
  std::vector<std::array<double, 2>> class_means{{-2.0, -2.0}, {2.0, 2.0}, {-2.0, 2.0}, {2.0, -2.0}};
  double class_var = 0.1;
  std::size_t n_inliers = 1000;
  double outlier_fraction = 0.2;
  double bbox_margin = 0.1;
  std::uint64_t seed = 0;

  static constexpr std::size_t kNumClasses = 2;
  double inlier_weight() const noexcept { return 1.0 - outlier_fraction; }
};

struct LabeledData {
  Tensor features{Shape{0, 0}};
  std::vector<int> labels;
  std::vector<long> ids;
};

struct DatasetSplit {
  Tensor teacher_train{Shape{0, 0}};
  std::vector<long> teacher_ids;
  std::vector<int> teacher_labels;  // audit only; the teacher never sees them
  Pool pool;
  LabeledData test;
  std::size_t num_classes = 2;
  BoundingBox bbox;                // toy only: outlier support
  std::vector<std::string> notes;  // e.g. outlier caps
};

DatasetSplit gen_toy(const ToySpec& spec);

struct IdxData {
  Tensor features{Shape{0, 0}};  // [n × rows*cols], scaled to [0, 1]
  std::vector<int> labels;
  std::size_t image_rows = 0;
  std::size_t image_cols = 0;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

IdxData load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);
// Inverse of load_idx: features are mapped back to bytes by round(255 x).
void write_idx(const IdxData& data, const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

struct MnistSplitOptions {
  std::vector<int> inlier_digits{0, 1, 2, 3, 4};
  std::size_t per_digit_teacher = 1000;
  double outlier_multiplier = 2.0;
  std::size_t pool_size = 0;  // 0 keeps every remaining inlier
  std::uint64_t seed = 0;
};

// `train` supplies teacher and pool samples, `test` the evaluation split.
// Inlier digits are relabeled 0..k-1 in the order given.
DatasetSplit mnist_split(const IdxData& train, const IdxData& test, const MnistSplitOptions& options);

// CSV `id,split,class_or_OUTLIER`.
void write_split_manifest(const DatasetSplit& split, const std::filesystem::path& path);

}  // namespace daal
