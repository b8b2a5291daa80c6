#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "daal/error.hpp"
#include "daal/learner.hpp"
#include "support/gradcheck.hpp"

using namespace daal;

namespace {

// Two clusters on either side of x0 = 0 with a gap of 2 (margin >= 1).
LabeledSet separable_set() {
  LabeledSet set;
  for (int i = 0; i < 10; ++i) {
    const double y = -1.0 + 0.2 * i;
    set.append(std::vector<double>{-1.0 - 0.1 * i, y}, 0, LabeledSet::kInitialOrigin, i);
    set.append(std::vector<double>{1.0 + 0.1 * i, -y}, 1, LabeledSet::kInitialOrigin, 10 + i);
  }
  return set;
}

}  // namespace

TEST_SUITE("learner") {
  TEST_CASE("entropy examples") {
    const auto h = entropy_of_rows(Tensor::matrix(3, 2, {0.5, 0.5, 1.0, 0.0, 0.9, 0.1}));
    CHECK(h[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(h[1] == 0.0);
    // Hand evaluation: -(0.9 ln 0.9 + 0.1 ln 0.1) = 0.0948245 + 0.2302585.
    CHECK(h[2] == doctest::Approx(0.3250830).epsilon(1e-6));
  }

  TEST_CASE("entropy bounds and permutation invariance") {
    Rng rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Tensor p(Shape{50, 4});
    for (std::size_t r = 0; r < 50; ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < 4; ++c) total += (p(r, c) = u(rng));
      for (std::size_t c = 0; c < 4; ++c) p(r, c) /= total;
    }
    Tensor permuted(p.shape());
    for (std::size_t r = 0; r < 50; ++r) {
      const std::size_t order[4] = {2, 0, 3, 1};
      for (std::size_t c = 0; c < 4; ++c) permuted(r, c) = p(r, order[c]);
    }
    const auto h = entropy_of_rows(p);
    const auto hp = entropy_of_rows(permuted);
    for (std::size_t r = 0; r < 50; ++r) {
      CHECK(h[r] >= 0.0);
      CHECK(h[r] <= std::log(4.0) + 1e-12);
      CHECK(h[r] == doctest::Approx(hp[r]).epsilon(1e-12));
    }
    const auto uniform = entropy_of_rows(Tensor(Shape{1, 4}, 0.25));
    CHECK(uniform[0] == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  }

  TEST_CASE("predict_proba rows are distributions") {
    ClassifierModel model({3, 6, 4});
    model.initialize(5);
    Rng rng(1);
    const Tensor x = testing::random_tensor({20, 3}, rng, -3, 3);
    const Tensor p = predict_proba(model, x);
    for (std::size_t r = 0; r < p.rows(); ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < p.cols(); ++c) {
        CHECK(p(r, c) > 0.0);
        CHECK(p(r, c) < 1.0);
        total += p(r, c);
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(predict_proba(model, Tensor(Shape{2, 4})), ContractError);
  }

  TEST_CASE("separable toy set reaches training accuracy 1") {
    const LabeledSet set = separable_set();
    ClassifierModel model({2, 8, 4, 2});
    const auto log = train(model, set, {200, 0.01, 32, 7});
    CHECK(log.size() == 200);
    CHECK(log.back() < log.front());
    CHECK(accuracy(model, set.features, set.labels) == 1.0);
  }

  TEST_CASE("zero epochs leaves the seeded initialization") {
    const LabeledSet set = separable_set();
    ClassifierModel trained({2, 8, 4, 2});
    const auto log = train(trained, set, {0, 0.01, 32, 7});
    CHECK(log.empty());
    ClassifierModel fresh({2, 8, 4, 2});
    fresh.initialize(derive_seed(7, 0));
    CHECK(trained.params().flatten() == fresh.params().flatten());
  }

  TEST_CASE("training is deterministic per seed") {
    const LabeledSet set = separable_set();
    ClassifierModel a({2, 8, 4, 2});
    ClassifierModel b({2, 8, 4, 2});
    train(a, set, {50, 0.01, 8, 3});
    train(b, set, {50, 0.01, 8, 3});
    CHECK(a.params().flatten() == b.params().flatten());
    Rng rng(4);
    const Tensor x = testing::random_tensor({30, 2}, rng, -3, 3);
    CHECK(entropy_scores(a, x) == entropy_scores(b, x));
    ClassifierModel c({2, 8, 4, 2});
    train(c, set, {50, 0.01, 8, 4});
    CHECK(a.params().flatten() != c.params().flatten());
  }

  TEST_CASE("train contract errors") {
    ClassifierModel model({2, 4, 2});
    CHECK_THROWS_AS(train(model, LabeledSet{}, {}), ContractError);
    LabeledSet wide;
    wide.append(std::vector<double>{1, 2, 3}, 0, LabeledSet::kInitialOrigin, 0);
    CHECK_THROWS_AS(train(model, wide, {}), ContractError);
  }

  TEST_CASE("classifier loss gradients match finite differences") {
    ClassifierModel model({3, 5, 4, 3});
    model.initialize(12);
    Rng rng(8);
    const auto x = Variable::constant(testing::random_tensor({6, 3}, rng, -2, 2));
    const std::vector<int> labels{0, 1, 2, 2, 1, 0};
    const double err = testing::max_grad_error(model.params(), [&] {
      return softmax_cross_entropy(model.logits(x), labels);
    });
    CHECK(err < testing::kGradTol);
  }

  TEST_CASE("classifier checkpoint round-trip") {
    ClassifierModel model({2, 8, 4, 2});
    model.initialize(21);
    const auto path = std::filesystem::temp_directory_path() / "daal_test_classifier.bin";
    save_classifier(model, path);
    const ClassifierModel loaded = load_classifier(path);
    CHECK(loaded.widths() == model.widths());
    CHECK(loaded.params().flatten() == model.params().flatten());
    std::ofstream(path, std::ios::binary) << "NOTMAGIC";
    CHECK_THROWS_AS(load_classifier(path), FormatError);
    std::filesystem::remove(path);
  }
}
