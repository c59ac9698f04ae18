#include "pinnfp/evaluation/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pinnfp/error.hpp"

namespace pinnfp::evaluation {

std::string_view to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::success:
      return "success";
    case OutcomeClass::stable_fp:
      return "stable-fp";
    case OutcomeClass::unstable_fp:
      return "unstable-fp";
  }
  return "?";
}

OutcomeClass parse_outcome_class(std::string_view s) {
  if (s == "success") return OutcomeClass::success;
  if (s == "stable-fp") return OutcomeClass::stable_fp;
  if (s == "unstable-fp") return OutcomeClass::unstable_fp;
  throw ConfigError("unknown outcome class '" + std::string(s) + "'");
}

double l2_relative_error(std::span<const double> prediction, std::span<const double> reference) {
  if (prediction.size() != reference.size())
    throw ConfigError("prediction has " + std::to_string(prediction.size()) + " samples, reference has " +
                      std::to_string(reference.size()));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = prediction[i] - reference[i];
    num += d * d;
    den += reference[i] * reference[i];
  }
  if (den == 0.0) throw UndefinedError("relative L2 error is undefined for a zero reference");
  return std::sqrt(num / den);
}

std::vector<double> evaluation_times(double T, std::size_t n) {
  if (n < 2) throw ConfigError("evaluation grid needs at least 2 times");
  if (!(T > 0.0)) throw ConfigError("evaluation horizon must be positive");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
  t.back() = T;
  return t;
}

Trajectory predict_trajectory(const training::Problem& problem, std::span<const double> params,
                              std::span<const double> times) {
  const auto& desc = problem.system->descriptor();
  if (desc.input_width() != 1) throw CapabilityError("trajectory prediction is defined for ODE systems");
  training::LossModel model = problem.loss_model();
  Eigen::MatrixXd pts(1, static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) pts(0, static_cast<Eigen::Index>(i)) = times[i];
  const autodiff::Partial parts[] = {systems::d::value, systems::d::t};
  const auto bundles = model.fields(params, pts, parts);
  Trajectory out;
  out.t.assign(times.begin(), times.end());
  out.y.reserve(times.size());
  out.ydot.reserve(times.size());
  for (const auto& b : bundles) {
    out.y.push_back(b.at(0, systems::d::value));
    out.ydot.push_back(b.at(0, systems::d::t));
  }
  return out;
}

Trajectory reference_trajectory(const systems::SystemDescriptor& system, std::span<const double> times) {
  Trajectory out;
  out.t.assign(times.begin(), times.end());
  if (system.name == "toy") {
    const double y0 = system.parameter("y0");
    for (double t : times) {
      const double y = oracles::toy_analytic(y0, t);
      out.y.push_back(y);
      out.ydot.push_back(y * (1.0 - y * y));
    }
    return out;
  }
  if (system.name == "pendulum") {
    const double T = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
    const auto ref = oracles::pendulum_reference(system.parameter("y0"), system.parameter("ydot0"), T, 1e-3,
                                                 system.parameter("g"), system.parameter("l"));
    for (double t : times) {
      out.y.push_back(ref.interpolate(t, 0));
      out.ydot.push_back(ref.interpolate(t, 1));
    }
    return out;
  }
  throw CapabilityError("no trajectory reference for system '" + system.name + "'");
}

namespace {

void check_grids(const Trajectory& prediction, const Trajectory& reference) {
  if (prediction.y.empty()) throw ConfigError("empty prediction");
  if (prediction.t != reference.t) throw ConfigError("prediction and reference use different time grids");
}

}  // namespace

Outcome classify_pendulum_outcome(const Trajectory& prediction, const Trajectory& reference, double threshold,
                                  double g, double l) {
  check_grids(prediction, reference);
  Outcome o;
  o.l2 = l2_relative_error(prediction.y, reference.y);
  o.y_T = prediction.y.back();
  o.ydot_T = prediction.ydot.back();
  o.energy_T = oracles::pendulum_energy(*o.y_T, *o.ydot_T, g, l);
  o.energy_0 = oracles::pendulum_energy(reference.y.front(), reference.ydot.front(), g, l);
  return reclassify(o, threshold);
}

Outcome classify_toy_outcome(const Trajectory& prediction, const Trajectory& reference, double threshold) {
  check_grids(prediction, reference);
  Outcome o;
  o.l2 = l2_relative_error(prediction.y, reference.y);
  o.y_T = prediction.y.back();
  o.ydot_T = prediction.ydot.back();
  return reclassify(o, threshold);
}

Outcome reclassify(const Outcome& o, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("success threshold must be positive");
  Outcome out = o;
  out.borderline = false;
  if (o.l2 < threshold) {
    out.cls = OutcomeClass::success;
  } else if (o.energy_T && o.energy_0) {
    const double e0 = *o.energy_0, eT = *o.energy_T;
    out.borderline = std::abs(eT - e0) <= 1e-3 * std::abs(e0);
    out.cls = eT < e0 ? OutcomeClass::stable_fp : OutcomeClass::unstable_fp;
  } else {
    out.cls = OutcomeClass::unstable_fp;
  }
  return out;
}

Outcome evaluate_run(const training::TrainConfig& config, const training::RunTrace& trace, double threshold) {
  const training::Problem problem = training::make_problem(config);
  const auto& desc = problem.system->descriptor();
  const auto times = evaluation_times(desc.horizon);
  const Trajectory pred = predict_trajectory(problem, trace.final_params.values(), times);
  const Trajectory ref = reference_trajectory(desc, times);
  Outcome o = desc.name == "pendulum"
                  ? classify_pendulum_outcome(pred, ref, threshold, desc.parameter("g"), desc.parameter("l"))
                  : classify_toy_outcome(pred, ref, threshold);
  o.min_L_f = trace.min_L_f();
  o.diverged = trace.diverged;
  return o;
}

}  // namespace pinnfp::evaluation
