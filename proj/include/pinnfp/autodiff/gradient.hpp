#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pinnfp/autodiff/tape.hpp"

namespace pinnfp::autodiff {

using ScalarLoss = std::function<Var(std::span<const Var>)>;

struct ValueAndGradient {
  double value = 0.0;
  std::vector<double> gradient;
};

/// d loss / d params by recording `loss` on a fresh tape and sweeping it once in reverse.
/// Throws NumericalError when an intermediate value is non-finite.
ValueAndGradient value_and_gradient(const ScalarLoss& loss, std::span<const double> params);

inline std::vector<double> loss_gradient(const ScalarLoss& loss, std::span<const double> params) {
  return value_and_gradient(loss, params).gradient;
}

}  // namespace pinnfp::autodiff
