#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "daal/autograd.hpp"
#include "daal/binary_io.hpp"
#include "daal/error.hpp"
#include "daal/layers.hpp"
#include "daal/optim.hpp"
#include "daal/tensor.hpp"
#include "support/gradcheck.hpp"
#include "support/op_cases.hpp"

using namespace daal;
using daal::testing::away_from_zero;
using daal::testing::kGradTol;
using daal::testing::leaf;
using daal::testing::max_grad_error;
using daal::testing::random_tensor;
using daal::testing::weighted_sum;

TEST_SUITE("numerics") {
  TEST_CASE("tensor construction and access") {
    Tensor t(Shape{2, 3}, 1.5);
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 3);
    CHECK(t.size() == 6);
    CHECK(t(1, 2) == 1.5);
    CHECK_THROWS_AS(Tensor(Shape{2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
    CHECK(Tensor::scalar(4.0).item() == 4.0);
    CHECK(Tensor::scalar(4.0).is_scalar());
    CHECK_THROWS_AS(t.item(), DimensionError);
    const Tensor m = Tensor::matrix(3, 2, {1, 2, 3, 4, 5, 6});
    const std::vector<std::size_t> rows{2, 0};
    CHECK(m.select_rows(rows) == Tensor::matrix(2, 2, {5, 6, 1, 2}));
    const std::vector<Tensor> parts{Tensor::matrix(1, 2, {1, 2}), Tensor::matrix(2, 2, {3, 4, 5, 6})};
    CHECK(vstack(parts) == Tensor::matrix(3, 2, {1, 2, 3, 4, 5, 6}));
  }

  TEST_CASE("matmul examples") {
    const auto id = Variable::constant(Tensor::matrix(2, 2, {1, 0, 0, 1}));
    const auto v = Variable::constant(Tensor::matrix(2, 1, {3, 4}));
    CHECK(matmul(id, v).value() == Tensor::matrix(2, 1, {3, 4}));
    const auto row = Variable::constant(Tensor::matrix(1, 2, {1, 2}));
    CHECK(matmul(row, v).value().item() == doctest::Approx(11.0));
  }

  TEST_CASE("matmul shape mismatch names both shapes") {
    const auto a = Variable::constant(Tensor(Shape{2, 3}));
    const auto b = Variable::constant(Tensor(Shape{2, 3}));
    try {
      matmul(a, b);
      FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("[2x3]") != std::string::npos);
    }
  }

  TEST_CASE("elementwise examples") {
    CHECK(sigmoid(Variable::constant(Tensor::scalar(0.0))).value().item() == 0.5);
    const auto r = relu(Variable::constant(Tensor::matrix(1, 2, {-3.0, 2.0}))).value();
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 2.0);
    auto x = Variable::leaf(Tensor::scalar(0.0));
    backward(sigmoid(x));
    CHECK(x.grad().item() == doctest::Approx(0.25));
    // Large-magnitude inputs stay finite.
    const auto s = sigmoid(Variable::constant(Tensor::matrix(1, 2, {-800.0, 800.0}))).value();
    CHECK(s[0] >= 0.0);
    CHECK(s[1] == 1.0);
  }

  TEST_CASE("log of nonpositive input is a domain error") {
    CHECK_THROWS_AS(log(Variable::constant(Tensor::matrix(1, 2, {1.0, 0.0}))), DomainError);
    CHECK_THROWS_AS(log(Variable::constant(Tensor::matrix(1, 1, {-2.0}))), DomainError);
  }

  TEST_CASE("incompatible elementwise shapes are a dimension error") {
    const auto a = Variable::constant(Tensor(Shape{2, 2}));
    const auto b = Variable::constant(Tensor(Shape{2, 3}));
    CHECK_THROWS_AS(add(a, b), DimensionError);
    CHECK_THROWS_AS(mul(a, b), DimensionError);
    CHECK_THROWS_AS(add_row_vector(a, Variable::constant(Tensor(Shape{1, 3}))), DimensionError);
  }

  TEST_CASE("softmax cross-entropy examples") {
    const std::vector<int> label0{0};
    const auto uniform = Variable::constant(Tensor::matrix(1, 2, {0.0, 0.0}));
    CHECK(softmax_cross_entropy(uniform, label0).value().item() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const auto peaked = Variable::constant(Tensor::matrix(1, 2, {1000.0, 0.0}));
    const double ce = softmax_cross_entropy(peaked, label0).value().item();
    CHECK(std::isfinite(ce));
    CHECK(ce == doctest::Approx(0.0).epsilon(1e-12));
    const std::vector<int> bad{2};
    CHECK_THROWS_AS(softmax_cross_entropy(uniform, bad), IndexError);
    const Tensor p = softmax(Tensor::matrix(1, 3, {1000.0, 1000.0, -1000.0}));
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[2] == 0.0);
  }

  TEST_CASE("backward requires a scalar loss") {
    auto x = leaf(Tensor(Shape{2, 2}, 1.0));
    CHECK_THROWS_AS(backward(x), ContractError);
  }

  TEST_CASE("leaf gradients accumulate until zeroed") {
    auto x = Variable::leaf(Tensor::scalar(3.0));
    backward(square(x));
    backward(square(x));
    CHECK(x.grad().item() == doctest::Approx(12.0));
    x.zero_grad();
    backward(square(x));
    CHECK(x.grad().item() == doctest::Approx(6.0));
  }

  TEST_CASE("no-grad guard records nothing") {
    auto x = Variable::leaf(Tensor::scalar(2.0));
    Variable y;
    {
      NoGradGuard guard;
      CHECK_FALSE(grad_enabled());
      y = square(x);
    }
    CHECK(grad_enabled());
    CHECK_FALSE(y.requires_grad());
  }

  TEST_CASE("gradients of every differentiable op match finite differences") {
    Rng rng(42);
    for (const auto& c : testing::op_gradient_errors(rng)) {
      INFO(c.name);
      CHECK(c.max_rel_error < kGradTol);
    }
  }

  TEST_CASE("gradient of a shared subexpression sums both paths") {
    Rng rng(3);
    const double err = max_grad_error({leaf(random_tensor({2, 2}, rng))}, [](const auto& v) {
      const Variable h = tanh(v[0]);
      return sum(add(mul(h, h), scale(h, 3.0)));
    });
    CHECK(err < kGradTol);
  }

  TEST_CASE("sgd and adam examples") {
    ParamStore store;
    auto p = store.add("p", Tensor::scalar(1.0));
    store.zero_grad();
    p.mutable_grad()[0] = 1.0;
    step(store, Sgd{0.1});
    CHECK(p.value().item() == doctest::Approx(0.9));

    for (double g : {1e-3, 1.0, 250.0, -7.0}) {
      ParamStore s;
      auto q = s.add("q", Tensor::scalar(2.0));
      s.zero_grad();
      q.mutable_grad()[0] = g;
      step(s, Adam{0.01});
      CHECK(std::abs(q.value().item() - 2.0) == doctest::Approx(0.01).epsilon(1e-4));
      CHECK((q.value().item() < 2.0) == (g > 0.0));
    }

    ParamStore z;
    auto r = z.add("r", Tensor::scalar(5.0));
    z.zero_grad();
    step(z, Adam{0.01});
    step(z, Sgd{0.5});
    CHECK(r.value().item() == 5.0);
  }

  TEST_CASE("optimizer contract errors") {
    ParamStore store;
    store.add("w", Tensor(Shape{2, 2}));
    CHECK_THROWS_AS(store.add("w", Tensor(Shape{1})), ContractError);
    CHECK_THROWS_AS(step(store, Sgd{0.1}), ContractError);
    CHECK_THROWS_AS(store.get("missing"), ContractError);
  }

  TEST_CASE("param store flatten and assign round-trip") {
    ParamStore store;
    store.add("a", Tensor::matrix(1, 2, {1, 2}));
    store.add("b", Tensor::matrix(2, 1, {3, 4}));
    CHECK(store.total_values() == 4);
    CHECK(store.flatten() == std::vector<double>{1, 2, 3, 4});
    const std::vector<double> next{5, 6, 7, 8};
    store.assign(next);
    CHECK(store.get("b").value()(1, 0) == 8.0);
    const std::vector<double> short_values{1};
    CHECK_THROWS_AS(store.assign(short_values), DimensionError);
  }

  TEST_CASE("adam minimizes a quadratic") {
    ParamStore store;
    auto w = store.add("w", Tensor::matrix(1, 2, {3.0, -2.0}));
    for (int i = 0; i < 2000; ++i) {
      store.zero_grad();
      backward(sum(square(add_scalar(w, -1.0))));
      step(store, Adam{0.05});
    }
    CHECK(w.value()[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(w.value()[1] == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("dense stack gradients") {
    ParamStore store;
    const std::vector<std::size_t> widths{3, 5, 2};
    register_dense_stack(store, "net.", widths);
    Rng rng(11);
    init_dense_stack(store, "net.", widths, rng);
    const auto x = Variable::constant(random_tensor({4, 3}, rng));
    const double err = max_grad_error(store, [&] {
      return weighted_sum(dense_forward(store, "net.", widths, x, Activation::tanh));
    });
    CHECK(err < kGradTol);
  }

  TEST_CASE("little-endian binary helpers round-trip") {
    std::stringstream buf;
    io::write_magic(buf, "ABCDEFGH");
    io::write_u32_le(buf, 0x01020304u);
    io::write_f64_le(buf, -1.25);
    const std::string bytes = buf.str();
    CHECK(static_cast<unsigned char>(bytes[8]) == 0x04);
    io::expect_magic(buf, "ABCDEFGH");
    CHECK(io::read_u32_le(buf) == 0x01020304u);
    CHECK(io::read_f64_le(buf) == -1.25);
    CHECK_THROWS_AS(io::read_u32_le(buf), LengthError);
    std::stringstream wrong("XXXXXXXX");
    CHECK_THROWS_AS(io::expect_magic(wrong, "ABCDEFGH"), FormatError);
  }
}
