#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pinnfp::training {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
};

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam update in place. The state is sized on first use.
/// Throws ConfigError when grad and params differ in length.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, double lr,
               const AdamSettings& settings = {});

/// lr * rate^(epoch / step); a non-positive step disables decay.
double decayed_learning_rate(double lr, double rate, double step, std::int64_t epoch);

}  // namespace pinnfp::training
