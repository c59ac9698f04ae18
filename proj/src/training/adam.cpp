#include "pinnfp/training/adam.hpp"

#include <cmath>

#include "pinnfp/error.hpp"

namespace pinnfp::training {

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, double lr,
               const AdamSettings& s) {
  if (grad.size() != params.size()) throw ConfigError("Adam: gradient and parameter lengths differ");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size()) throw ConfigError("Adam: state does not match parameter length");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(s.beta1, t);
  const double c2 = 1.0 - std::pow(s.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    state.m[i] = s.beta1 * state.m[i] + (1.0 - s.beta1) * g;
    state.v[i] = s.beta2 * state.v[i] + (1.0 - s.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + s.epsilon);
  }
}

double decayed_learning_rate(double lr, double rate, double step, std::int64_t epoch) {
  if (!(step > 0.0)) return lr;
  return lr * std::pow(rate, static_cast<double>(epoch) / step);
}

}  // namespace pinnfp::training
