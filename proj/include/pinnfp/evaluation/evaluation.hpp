#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pinnfp/oracles/oracles.hpp"
#include "pinnfp/training/config.hpp"
#include "pinnfp/training/train.hpp"

namespace pinnfp::evaluation {

enum class OutcomeClass { success, stable_fp, unstable_fp };
std::string_view to_string(OutcomeClass c);
OutcomeClass parse_outcome_class(std::string_view s);

struct Outcome {
  double l2 = 0.0;
  OutcomeClass cls = OutcomeClass::success;
  double min_L_f = 0.0;
  std::optional<double> y_T;
  std::optional<double> ydot_T;
  std::optional<double> energy_T;  // pendulum only
  std::optional<double> energy_0;
  bool borderline = false;  // energy within tolerance of the true orbit; classified by sign
  bool diverged = false;
};

/// ||pred - ref||_2 / ||ref||_2. Throws UndefinedError for a zero reference and ConfigError on a
/// length mismatch.
double l2_relative_error(std::span<const double> prediction, std::span<const double> reference);

/// 1000 equispaced times in [0, T] unless n says otherwise.
std::vector<double> evaluation_times(double T, std::size_t n = 1000);

/// ODE network prediction (y and ydot) at the given times.
struct Trajectory {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> ydot;
};
Trajectory predict_trajectory(const training::Problem& problem, std::span<const double> params,
                              std::span<const double> times);

/// Reference y (and ydot) on `times`: closed form for the toy, RK4 (dt = 1e-3) for the pendulum.
Trajectory reference_trajectory(const systems::SystemDescriptor& system, std::span<const double> times);

/// success if L2 < threshold; otherwise the final energy E(T) against the orbit energy E0 of the
/// initial state: below E0 - tol is stable-fp, above E0 + tol unstable-fp, tol = 1e-3 |E0|.
/// Inside the tolerance band the sign decides and the outcome is flagged borderline.
Outcome classify_pendulum_outcome(const Trajectory& prediction, const Trajectory& reference, double threshold,
                                  double g = systems::kGravity, double l = systems::kRodLength);

/// Toy runs are success or unstable-fp.
Outcome classify_toy_outcome(const Trajectory& prediction, const Trajectory& reference, double threshold);

/// Same run scored at another threshold (uses the stored L2 error and energies).
Outcome reclassify(const Outcome& o, double threshold);

/// Scores the final (last finite) parameters of a run on 1000 equispaced times.
Outcome evaluate_run(const training::TrainConfig& config, const training::RunTrace& trace, double threshold = 0.15);

}  // namespace pinnfp::evaluation
