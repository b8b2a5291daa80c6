#include "daal/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "daal/binary_io.hpp"
#include "daal/error.hpp"
#include "daal/rng.hpp"

namespace daal {

namespace {

std::string hex32(std::uint32_t v) {
  std::ostringstream os;
  os << "0x" << std::hex;
  os.width(8);
  os.fill('0');
  os << v;
  return os.str();
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

void check_magic(std::uint32_t found, std::uint32_t expected, const std::filesystem::path& path) {
  if (found != expected) {
    throw FormatError("bad IDX magic in " + path.string() + ": expected " + hex32(expected) + ", found " + hex32(found));
  }
}

Tensor gather(const Tensor& x, const std::vector<std::size_t>& rows) {
  return x.select_rows(rows);
}

}  // namespace

DatasetSplit gen_toy(const ToySpec& spec) {
  if (spec.modes_per_class == 0 || spec.n_inliers == 0 || spec.n_inliers < 4 * spec.modes_per_class) {
    throw ContractError("gen_toy: need n_inliers >= 4 * modes_per_class (got " + std::to_string(spec.n_inliers) + ")");
  }
  if (spec.class_means.size() != ToySpec::kNumClasses * spec.modes_per_class) {
    throw ContractError("gen_toy: expected " + std::to_string(ToySpec::kNumClasses * spec.modes_per_class) +
                        " mode centers, got " + std::to_string(spec.class_means.size()));
  }
  if (!(spec.class_var > 0.0)) throw ContractError("gen_toy: class variance must be positive");
  if (!(spec.outlier_fraction >= 0.0 && spec.outlier_fraction < 1.0)) {
    throw ContractError("gen_toy: outlier fraction must lie in [0, 1)");
  }
  if (!(spec.bbox_margin >= 0.0)) throw ContractError("gen_toy: bbox margin must be >= 0");

  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(spec.class_var));

  const std::size_t n = spec.n_inliers;
  Tensor inliers({n, 2});
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = i % ToySpec::kNumClasses;
    const std::size_t mode = (i / ToySpec::kNumClasses) % spec.modes_per_class;
    const auto& center = spec.class_means[cls * spec.modes_per_class + mode];
    inliers(i, 0) = center[0] + normal(rng);
    inliers(i, 1) = center[1] + normal(rng);
    labels[i] = static_cast<int>(cls);
  }

  BoundingBox box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n; ++i) {
    box.x_min = std::min(box.x_min, inliers(i, 0));
    box.x_max = std::max(box.x_max, inliers(i, 0));
    box.y_min = std::min(box.y_min, inliers(i, 1));
    box.y_max = std::max(box.y_max, inliers(i, 1));
  }
  const double dx = (box.x_max - box.x_min) * spec.bbox_margin;
  const double dy = (box.y_max - box.y_min) * spec.bbox_margin;
  box = {box.x_min - dx, box.x_max + dx, box.y_min - dy, box.y_max + dy};

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_pool = static_cast<std::size_t>(std::llround(0.6 * static_cast<double>(n)));
  const auto n_teacher = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
  std::vector<std::size_t> pool_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_pool));
  std::vector<std::size_t> teacher_rows(order.begin() + static_cast<std::ptrdiff_t>(n_pool),
                                        order.begin() + static_cast<std::ptrdiff_t>(n_pool + n_teacher));
  std::vector<std::size_t> test_rows(order.begin() + static_cast<std::ptrdiff_t>(n_pool + n_teacher), order.end());
  for (auto* rows : {&pool_rows, &teacher_rows, &test_rows}) std::sort(rows->begin(), rows->end());

  const double odds = spec.outlier_fraction / (1.0 - spec.outlier_fraction);
  const auto n_out = static_cast<std::size_t>(std::llround(odds * static_cast<double>(n_pool)));
  std::uniform_real_distribution<double> ux(box.x_min, box.x_max);
  std::uniform_real_distribution<double> uy(box.y_min, box.y_max);

  DatasetSplit split;
  split.num_classes = ToySpec::kNumClasses;
  split.bbox = box;

  split.teacher_train = gather(inliers, teacher_rows);
  for (std::size_t r : teacher_rows) {
    split.teacher_ids.push_back(static_cast<long>(r));
    split.teacher_labels.push_back(labels[r]);
  }

  split.test.features = gather(inliers, test_rows);
  for (std::size_t r : test_rows) {
    split.test.labels.push_back(labels[r]);
    split.test.ids.push_back(static_cast<long>(r));
  }

  Tensor pool_x({n_pool + n_out, 2});
  std::vector<int> pool_labels;
  std::vector<long> pool_ids;
  for (std::size_t i = 0; i < n_pool; ++i) {
    pool_x(i, 0) = inliers(pool_rows[i], 0);
    pool_x(i, 1) = inliers(pool_rows[i], 1);
    pool_labels.push_back(labels[pool_rows[i]]);
    pool_ids.push_back(static_cast<long>(pool_rows[i]));
  }
  for (std::size_t j = 0; j < n_out; ++j) {
    pool_x(n_pool + j, 0) = ux(rng);
    pool_x(n_pool + j, 1) = uy(rng);
    pool_labels.push_back(kOutlierLabel);
    pool_ids.push_back(static_cast<long>(n + j));
  }
  split.pool = make_pool(std::move(pool_x), std::move(pool_labels), std::move(pool_ids));
  return split;
}

IdxData load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  std::ifstream images = open_binary(images_path);
  std::ifstream labels = open_binary(labels_path);

  check_magic(io::read_u32_be(images), kIdxImageMagic, images_path);
  const std::uint32_t n_images = io::read_u32_be(images);
  const std::uint32_t rows = io::read_u32_be(images);
  const std::uint32_t cols = io::read_u32_be(images);

  check_magic(io::read_u32_be(labels), kIdxLabelMagic, labels_path);
  const std::uint32_t n_labels = io::read_u32_be(labels);
  if (n_images != n_labels) {
    throw FormatError("IDX count mismatch: " + std::to_string(n_images) + " images vs " + std::to_string(n_labels) +
                      " labels");
  }

  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  std::vector<unsigned char> raw(static_cast<std::size_t>(n_images) * pixels);
  images.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(images.gcount()) != raw.size()) {
    throw LengthError("truncated IDX image file " + images_path.string() + ": expected " + std::to_string(raw.size()) +
                      " pixel bytes, found " + std::to_string(images.gcount()));
  }
  std::vector<unsigned char> raw_labels(n_labels);
  labels.read(reinterpret_cast<char*>(raw_labels.data()), static_cast<std::streamsize>(raw_labels.size()));
  if (static_cast<std::size_t>(labels.gcount()) != raw_labels.size()) {
    throw LengthError("truncated IDX label file " + labels_path.string() + ": expected " +
                      std::to_string(raw_labels.size()) + " label bytes, found " + std::to_string(labels.gcount()));
  }

  IdxData out;
  out.image_rows = rows;
  out.image_cols = cols;
  std::vector<double> values(raw.size());
  std::transform(raw.begin(), raw.end(), values.begin(), [](unsigned char b) { return static_cast<double>(b) / 255.0; });
  out.features = Tensor({n_images, pixels}, std::move(values));
  out.labels.assign(raw_labels.begin(), raw_labels.end());
  return out;
}

void write_idx(const IdxData& data, const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  const std::size_t n = data.labels.size();
  const std::size_t pixels = data.image_rows * data.image_cols;
  if (data.features.rows() != n || data.features.cols() != pixels) {
    throw ContractError("write_idx: features " + shape_str(data.features.shape()) + " do not match " +
                        std::to_string(n) + " images of " + std::to_string(data.image_rows) + "x" +
                        std::to_string(data.image_cols));
  }
  std::ofstream images(images_path, std::ios::binary);
  std::ofstream labels(labels_path, std::ios::binary);
  if (!images) throw IoError("cannot open " + images_path.string() + " for writing");
  if (!labels) throw IoError("cannot open " + labels_path.string() + " for writing");
  io::write_u32_be(images, kIdxImageMagic);
  io::write_u32_be(images, static_cast<std::uint32_t>(n));
  io::write_u32_be(images, static_cast<std::uint32_t>(data.image_rows));
  io::write_u32_be(images, static_cast<std::uint32_t>(data.image_cols));
  std::vector<char> raw(data.features.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = std::clamp(data.features[i], 0.0, 1.0);
    raw[i] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
  }
  images.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  io::write_u32_be(labels, kIdxLabelMagic);
  io::write_u32_be(labels, static_cast<std::uint32_t>(n));
  for (int label : data.labels) labels.put(static_cast<char>(label));
}

DatasetSplit mnist_split(const IdxData& train, const IdxData& test, const MnistSplitOptions& options) {
  if (options.inlier_digits.empty()) throw ContractError("mnist_split: no inlier digits");
  if (!(options.outlier_multiplier >= 0.0)) throw ContractError("mnist_split: outlier multiplier must be >= 0");
  std::vector<int> relabel(256, -1);
  for (std::size_t k = 0; k < options.inlier_digits.size(); ++k) {
    const int d = options.inlier_digits[k];
    if (d < 0 || d > 255 || relabel[static_cast<std::size_t>(d)] != -1) {
      throw ContractError("mnist_split: invalid or repeated inlier digit " + std::to_string(d));
    }
    relabel[static_cast<std::size_t>(d)] = static_cast<int>(k);
  }
  auto class_of = [&relabel](int digit) { return digit >= 0 && digit < 256 ? relabel[static_cast<std::size_t>(digit)] : -1; };

  Rng rng(options.seed);
  DatasetSplit split;
  split.num_classes = options.inlier_digits.size();

  std::vector<std::size_t> teacher_rows;
  std::vector<std::size_t> pool_inlier_rows;
  for (int digit : options.inlier_digits) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < train.labels.size(); ++i) {
      if (train.labels[i] == digit) rows.push_back(i);
    }
    if (rows.size() < options.per_digit_teacher) {
      throw ContractError("mnist_split: digit " + std::to_string(digit) + " has " + std::to_string(rows.size()) +
                          " training images, teacher needs " + std::to_string(options.per_digit_teacher));
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    teacher_rows.insert(teacher_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(options.per_digit_teacher));
    pool_inlier_rows.insert(pool_inlier_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(options.per_digit_teacher),
                            rows.end());
  }

  if (options.pool_size > 0) {
    const auto want = static_cast<std::size_t>(
        std::llround(static_cast<double>(options.pool_size) / (1.0 + options.outlier_multiplier)));
    if (want < pool_inlier_rows.size()) {
      std::shuffle(pool_inlier_rows.begin(), pool_inlier_rows.end(), rng);
      pool_inlier_rows.resize(want);
    } else if (want > pool_inlier_rows.size()) {
      split.notes.push_back("pool_size asks for " + std::to_string(want) + " inliers, only " +
                            std::to_string(pool_inlier_rows.size()) + " available");
    }
  }

  std::vector<std::size_t> outlier_rows;
  for (std::size_t i = 0; i < train.labels.size(); ++i) {
    if (class_of(train.labels[i]) < 0) outlier_rows.push_back(i);
  }
  std::shuffle(outlier_rows.begin(), outlier_rows.end(), rng);
  const auto want_outliers = static_cast<std::size_t>(
      std::llround(options.outlier_multiplier * static_cast<double>(pool_inlier_rows.size())));
  if (want_outliers > outlier_rows.size()) {
    split.notes.push_back("outliers capped at availability: wanted " + std::to_string(want_outliers) + ", have " +
                          std::to_string(outlier_rows.size()));
  }
  outlier_rows.resize(std::min(want_outliers, outlier_rows.size()));

  std::sort(teacher_rows.begin(), teacher_rows.end());
  split.teacher_train = train.features.select_rows(teacher_rows);
  for (std::size_t r : teacher_rows) {
    split.teacher_ids.push_back(static_cast<long>(r));
    split.teacher_labels.push_back(class_of(train.labels[r]));
  }

  std::vector<std::size_t> pool_rows = pool_inlier_rows;
  pool_rows.insert(pool_rows.end(), outlier_rows.begin(), outlier_rows.end());
  std::sort(pool_rows.begin(), pool_rows.end());
  std::vector<int> pool_labels;
  std::vector<long> pool_ids;
  for (std::size_t r : pool_rows) {
    const int cls = class_of(train.labels[r]);
    pool_labels.push_back(cls < 0 ? kOutlierLabel : cls);
    pool_ids.push_back(static_cast<long>(r));
  }
  split.pool = make_pool(train.features.select_rows(pool_rows), std::move(pool_labels), std::move(pool_ids));

  std::vector<std::size_t> test_rows;
  for (std::size_t i = 0; i < test.labels.size(); ++i) {
    if (class_of(test.labels[i]) >= 0) test_rows.push_back(i);
  }
  split.test.features = test.features.select_rows(test_rows);
  const long test_offset = static_cast<long>(train.labels.size());
  for (std::size_t r : test_rows) {
    split.test.labels.push_back(class_of(test.labels[r]));
    split.test.ids.push_back(test_offset + static_cast<long>(r));
  }
  return split;
}

void write_split_manifest(const DatasetSplit& split, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "id,split,class_or_OUTLIER\n";
  for (std::size_t i = 0; i < split.teacher_ids.size(); ++i) {
    out << split.teacher_ids[i] << ",teacher,";
    if (i < split.teacher_labels.size()) out << split.teacher_labels[i];
    out << '\n';
  }
  for (std::size_t i = 0; i < split.pool.size(); ++i) {
    out << split.pool.ids[i] << ",pool,";
    if (split.pool.is_outlier(i)) {
      out << "OUTLIER";
    } else {
      out << split.pool.true_labels[i];
    }
    out << '\n';
  }
  for (std::size_t i = 0; i < split.test.ids.size(); ++i) out << split.test.ids[i] << ",test," << split.test.labels[i] << '\n';
}

}  // namespace daal
