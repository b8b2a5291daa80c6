#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "daal/binary_io.hpp"
#include "daal/datasets.hpp"
#include "daal/error.hpp"

using namespace daal;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "daal_dataset_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

std::string be32(std::uint32_t v) {
  std::ostringstream out;
  io::write_u32_be(out, v);
  return out.str();
}

// n images of rows x cols with pixel (i, j) = (i + j) mod 256.
void make_idx(const fs::path& images, const fs::path& labels, std::uint32_t n, std::uint32_t rows, std::uint32_t cols) {
  std::string img = be32(kIdxImageMagic) + be32(n) + be32(rows) + be32(cols);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < rows * cols; ++j) img.push_back(static_cast<char>((i + j) % 256));
  }
  write_bytes(images, img);
  std::string lab = be32(kIdxLabelMagic) + be32(n);
  for (std::uint32_t i = 0; i < n; ++i) lab.push_back(static_cast<char>(i % 10));
  write_bytes(labels, lab);
}

// Synthetic "MNIST": `per_digit` images of each digit, pixel 0 encodes the digit.
IdxData fake_mnist(std::size_t per_digit) {
  IdxData d;
  d.image_rows = 2;
  d.image_cols = 2;
  const std::size_t n = per_digit * 10;
  d.features = Tensor(Shape{n, 4});
  for (std::size_t i = 0; i < n; ++i) {
    d.labels.push_back(static_cast<int>(i % 10));
    d.features(i, 0) = static_cast<double>(i % 10) / 255.0;
    d.features(i, 1) = static_cast<double>(i % 256) / 255.0;
  }
  return d;
}

}  // namespace

TEST_SUITE("datasets") {
  TEST_CASE("toy split invariants") {
    ToySpec spec;
    spec.seed = 12;
    const DatasetSplit s = gen_toy(spec);
    CHECK(s.teacher_train.rows() == 200);
    CHECK(s.test.features.rows() == 200);
    CHECK(s.pool.size() - s.pool.outlier_count() == 600);
    // mu2 / (1 - mu2) * 600 = 150 outliers, i.e. 20% of the pool.
    CHECK(s.pool.outlier_count() == 150);
    std::set<long> ids(s.teacher_ids.begin(), s.teacher_ids.end());
    for (long id : s.pool.ids) CHECK(ids.insert(id).second);
    for (long id : s.test.ids) CHECK(ids.insert(id).second);
    for (int label : s.test.labels) CHECK(label != kOutlierLabel);
    for (int label : s.teacher_labels) CHECK(label != kOutlierLabel);
    const auto inside = [&](const Tensor& x) {
      for (std::size_t i = 0; i < x.rows(); ++i) {
        CHECK(x(i, 0) > s.bbox.x_min);
        CHECK(x(i, 0) < s.bbox.x_max);
        CHECK(x(i, 1) > s.bbox.y_min);
        CHECK(x(i, 1) < s.bbox.y_max);
      }
    };
    inside(s.teacher_train);
    inside(s.test.features);
    inside(s.pool.features);
  }

  TEST_CASE("toy generation is deterministic and seed dependent") {
    ToySpec spec;
    spec.seed = 3;
    const DatasetSplit a = gen_toy(spec);
    const DatasetSplit b = gen_toy(spec);
    CHECK(a.pool.features == b.pool.features);
    CHECK(a.pool.ids == b.pool.ids);
    CHECK(a.teacher_train == b.teacher_train);
    spec.seed = 4;
    CHECK_FALSE(gen_toy(spec).pool.features == a.pool.features);
  }

  TEST_CASE("toy edge cases") {
    ToySpec spec;
    spec.outlier_fraction = 0.0;
    CHECK(gen_toy(spec).pool.outlier_count() == 0);
    spec.n_inliers = 0;
    CHECK_THROWS_AS(gen_toy(spec), ContractError);
    ToySpec flat;
    flat.class_var = 0.0;
    CHECK_THROWS_AS(gen_toy(flat), ContractError);
    ToySpec wrong_means;
    wrong_means.class_means.pop_back();
    CHECK_THROWS_AS(gen_toy(wrong_means), ContractError);
  }

  TEST_CASE("toy modes are balanced per class") {
    ToySpec spec;
    spec.class_var = 0.01;
    spec.outlier_fraction = 0.0;
    const DatasetSplit s = gen_toy(spec);
    std::size_t per_mode[4] = {0, 0, 0, 0};
    const auto tally = [&](const Tensor& x) {
      for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t m = 0; m < 4; ++m) {
          if (std::hypot(x(i, 0) - spec.class_means[m][0], x(i, 1) - spec.class_means[m][1]) < 1.0) ++per_mode[m];
        }
      }
    };
    tally(s.pool.features);
    tally(s.teacher_train);
    tally(s.test.features);
    for (std::size_t count : per_mode) CHECK(count == 250);
  }

  TEST_CASE("IDX headers are parsed big-endian") {
    const auto img = scratch("ok-images");
    const auto lab = scratch("ok-labels");
    make_idx(img, lab, 3, 4, 5);
    const std::string header = slurp(img).substr(0, 4);
    CHECK(header == std::string("\x00\x00\x08\x03", 4));
    CHECK(slurp(lab).substr(0, 4) == std::string("\x00\x00\x08\x01", 4));
    const IdxData d = load_idx(img, lab);
    CHECK(d.image_rows == 4);
    CHECK(d.image_cols == 5);
    CHECK(d.features.rows() == 3);
    CHECK(d.features.cols() == 20);
    CHECK(d.labels == std::vector<int>{0, 1, 2});
    CHECK(d.features(1, 0) == doctest::Approx(1.0 / 255.0));
  }

  TEST_CASE("IDX pixel 255 maps to 1") {
    const auto img = scratch("white-images");
    const auto lab = scratch("white-labels");
    write_bytes(img, be32(kIdxImageMagic) + be32(1) + be32(1) + be32(2) + std::string("\xff\x00", 2));
    write_bytes(lab, be32(kIdxLabelMagic) + be32(1) + std::string(1, '\x07'));
    const IdxData d = load_idx(img, lab);
    CHECK(d.features(0, 0) == 1.0);
    CHECK(d.features(0, 1) == 0.0);
    CHECK(d.labels[0] == 7);
  }

  TEST_CASE("IDX errors") {
    const auto img = scratch("e-images");
    const auto lab = scratch("e-labels");
    make_idx(img, lab, 4, 2, 2);
    SUBCASE("swapped files give a format error naming both magics") {
      try {
        load_idx(lab, img);
        FAIL("expected FormatError");
      } catch (const FormatError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("0x00000803") != std::string::npos);
        CHECK(msg.find("0x00000801") != std::string::npos);
      }
    }
    SUBCASE("truncated pixels") {
      fs::resize_file(img, fs::file_size(img) - 3);
      CHECK_THROWS_AS(load_idx(img, lab), LengthError);
    }
    SUBCASE("truncated header") {
      fs::resize_file(lab, 6);
      CHECK_THROWS_AS(load_idx(img, lab), LengthError);
    }
    SUBCASE("count mismatch") {
      const auto lab2 = scratch("e-labels-short");
      write_bytes(lab2, be32(kIdxLabelMagic) + be32(3) + std::string(3, '\x01'));
      CHECK_THROWS_AS(load_idx(img, lab2), FormatError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_idx(scratch("nope"), lab), IoError); }
  }

  TEST_CASE("IDX write round-trips bytes") {
    const auto img = scratch("rt-images");
    const auto lab = scratch("rt-labels");
    make_idx(img, lab, 7, 3, 3);
    const IdxData d = load_idx(img, lab);
    write_idx(d, scratch("rt2-images"), scratch("rt2-labels"));
    CHECK(slurp(img) == slurp(scratch("rt2-images")));
    CHECK(slurp(lab) == slurp(scratch("rt2-labels")));
  }

  TEST_CASE("mnist split sizes and labels") {
    const IdxData train = fake_mnist(30);
    const IdxData test = fake_mnist(5);
    MnistSplitOptions opt;
    opt.per_digit_teacher = 10;
    opt.outlier_multiplier = 2.0;
    opt.seed = 1;
    const DatasetSplit s = mnist_split(train, test, opt);
    CHECK(s.num_classes == 5);
    CHECK(s.teacher_train.rows() == 50);
    const std::size_t inliers = s.pool.size() - s.pool.outlier_count();
    CHECK(inliers == 100);
    // 200 outliers wanted, 150 available: capped and noted.
    CHECK(s.pool.outlier_count() == 150);
    CHECK_FALSE(s.notes.empty());
    CHECK(s.test.features.rows() == 25);
    for (int label : s.test.labels) {
      CHECK(label >= 0);
      CHECK(label < 5);
    }
    for (std::size_t i = 0; i < s.pool.size(); ++i) {
      const int digit = static_cast<int>(std::lround(s.pool.features(i, 0) * 255.0));
      if (digit >= 5) {
        CHECK(s.pool.is_outlier(i));
      } else {
        CHECK(s.pool.true_labels[i] == digit);
      }
    }
    std::set<long> ids(s.teacher_ids.begin(), s.teacher_ids.end());
    for (long id : s.pool.ids) CHECK(ids.insert(id).second);
    for (long id : s.test.ids) CHECK(ids.insert(id).second);
  }

  TEST_CASE("mnist split with pool cap and reordered digits") {
    const IdxData train = fake_mnist(40);
    MnistSplitOptions opt;
    opt.inlier_digits = {7, 3};
    opt.per_digit_teacher = 5;
    opt.outlier_multiplier = 1.0;
    opt.pool_size = 40;
    const DatasetSplit s = mnist_split(train, fake_mnist(2), opt);
    CHECK(s.pool.size() == 40);
    CHECK(s.pool.outlier_count() == 20);
    for (std::size_t i = 0; i < s.pool.size(); ++i) {
      const int digit = static_cast<int>(std::lround(s.pool.features(i, 0) * 255.0));
      if (digit == 7) CHECK(s.pool.true_labels[i] == 0);
      if (digit == 3) CHECK(s.pool.true_labels[i] == 1);
    }
    opt.per_digit_teacher = 100;
    CHECK_THROWS_AS(mnist_split(train, fake_mnist(2), opt), ContractError);
  }

  TEST_CASE("split manifest") {
    ToySpec spec;
    spec.n_inliers = 20;
    const DatasetSplit s = gen_toy(spec);
    const auto path = scratch("manifest.csv");
    write_split_manifest(s, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "id,split,class_or_OUTLIER");
    std::size_t rows = 0;
    std::size_t outliers = 0;
    while (std::getline(in, line)) {
      ++rows;
      outliers += line.ends_with(",OUTLIER");
    }
    CHECK(rows == s.teacher_train.rows() + s.pool.size() + s.test.features.rows());
    CHECK(outliers == s.pool.outlier_count());
  }
}
