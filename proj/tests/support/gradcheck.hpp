#pragma once

// Central finite-difference gradient check shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "daal/autograd.hpp"
#include "daal/optim.hpp"
#include "daal/rng.hpp"

namespace daal::testing {

inline constexpr double kFdStep = 1e-5;
inline constexpr double kGradTol = 1e-4;

// |a - n| / max(|a|, |n|, floor). The floor keeps near-zero components from
// turning round-off into a huge ratio.
inline double rel_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Max relative error over every entry of every input. `loss` must build a
// fresh scalar graph from the given leaves each call.
inline double max_grad_error(std::vector<Variable> inputs,
                             const std::function<Variable(const std::vector<Variable>&)>& loss) {
  for (auto& v : inputs) v.zero_grad();
  backward(loss(inputs));
  double worst = 0.0;
  for (auto& v : inputs) {
    const Tensor analytic = v.grad();
    Tensor& value = v.mutable_value();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + kFdStep;
      double up;
      double down;
      {
        NoGradGuard guard;
        up = loss(inputs).value().item();
        value[i] = saved - kFdStep;
        down = loss(inputs).value().item();
      }
      value[i] = saved;
      worst = std::max(worst, rel_error(analytic[i], (up - down) / (2.0 * kFdStep)));
    }
  }
  return worst;
}

// Same check over every parameter in a store.
inline double max_grad_error(ParamStore& store, const std::function<Variable()>& loss) {
  store.zero_grad();
  backward(loss());
  double worst = 0.0;
  for (const auto& entry : store.entries()) {
    Variable p = entry.param;
    const Tensor analytic = p.grad();
    Tensor& value = p.mutable_value();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      double up;
      double down;
      {
        NoGradGuard guard;
        value[i] = saved + kFdStep;
        up = loss().value().item();
        value[i] = saved - kFdStep;
        down = loss().value().item();
      }
      value[i] = saved;
      worst = std::max(worst, rel_error(analytic[i], (up - down) / (2.0 * kFdStep)));
    }
  }
  return worst;
}

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(std::move(shape));
  for (auto& x : t.data()) x = dist(rng);
  return t;
}

// Values bounded away from zero, for kinked ops (relu, clamp) and log.
inline Tensor away_from_zero(Shape shape, Rng& rng, double min_abs = 0.1, double max_abs = 1.0) {
  std::uniform_real_distribution<double> mag(min_abs, max_abs);
  std::bernoulli_distribution sign(0.5);
  Tensor t(std::move(shape));
  for (auto& x : t.data()) x = sign(rng) ? mag(rng) : -mag(rng);
  return t;
}

}  // namespace daal::testing
