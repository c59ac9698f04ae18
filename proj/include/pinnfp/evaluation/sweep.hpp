#pragma once

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "pinnfp/evaluation/evaluation.hpp"
#include "pinnfp/training/config.hpp"
#include "pinnfp/training/train.hpp"

namespace pinnfp::evaluation {

/// One cell of a sweep grid. y0 is kept in the unit it was given in (degrees when y0_in_degrees).
struct SweepCell {
  double T = 0.0;
  double y0 = 0.0;
  bool y0_in_degrees = false;
  std::string arch;
  std::string activation;
  double alpha = 0.0;
  std::int64_t n_c = 0;
  double lambda = 0.0;
  std::string init;

  bool operator==(const SweepCell&) const = default;
};

/// Cartesian product over the listed axes; an axis left empty takes its value from `base`.
///
/// JSON: {"base": <train config>, "grid": {"T": [..], "y0" | "y0_deg": [..], "arch": [..],
/// "activation": [..], "alpha": [..], "Nc": [..], "lambda": [..], "init": [..]},
/// "seeds": n, "threshold": 0.15}
struct SweepGrid {
  training::TrainConfig base;
  std::vector<double> T;
  std::vector<double> y0;
  bool y0_in_degrees = false;
  std::vector<std::string> arch;
  std::vector<std::string> activation;
  std::vector<double> alpha;
  std::vector<std::int64_t> n_c;
  std::vector<double> lambda;
  std::vector<std::string> init;
  int seeds = 10;
  double threshold = 0.15;

  std::vector<SweepCell> cells() const;
  /// Training config for one cell and seed index; the run seed is base.seed + seed_index.
  training::TrainConfig config_for(const SweepCell& cell, int seed_index) const;
  void validate() const;

  static SweepGrid from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct SweepRow {
  SweepCell cell;
  std::uint64_t seed = 0;
  Outcome outcome;
};

struct CellSummary {
  SweepCell cell;
  int runs = 0;
  double success_pct = 0.0;
  double stable_pct = 0.0;
  double unstable_pct = 0.0;
  int borderline = 0;
  int diverged = 0;
  double median_min_L_f = 0.0;
  double best_min_L_f = 0.0;
};

struct RunOptions {
  unsigned threads = 1;
  /// Called after each finished run with (finished, total); serialized by the harness.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Trains seeds runs per cell (in parallel when threads > 1) and scores each. Rows come back in
/// cell-major, seed-minor order regardless of scheduling.
/// When `traces` is given it receives the run traces in the same order.
std::vector<SweepRow> run_sweep(const SweepGrid& grid, const RunOptions& options = {},
                                std::vector<training::RunTrace>* traces = nullptr);

/// Per-cell aggregation in first-appearance order.
std::vector<CellSummary> summarize(const std::vector<SweepRow>& rows);

/// `T,y0,arch,activation,alpha,Nc,lambda,init,seed,L2,class,minLf`
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Aggregated table: success/stable-fp/unstable-fp percentages for the pendulum, success for the toy.
std::string sweep_markdown(const std::vector<SweepRow>& rows, const std::string& system, bool y0_in_degrees);

double median(std::vector<double> values);

/// Minimum physics loss reached per run for data-guided and physics-driven training of the same
/// problem over a list of initial conditions.
///
/// JSON: {"base": <train config>, "y0": [..] | "y0_deg": [..],
/// "approaches": ["data-guided", "physics-driven"], "seeds": n, "threshold": 0.15}
struct MinimaStudy {
  training::TrainConfig base;
  std::vector<double> y0;
  bool y0_in_degrees = false;
  std::vector<training::Schedule> approaches{training::Schedule::data_guided, training::Schedule::physics_driven};
  int seeds = 5;
  double threshold = 0.15;

  training::TrainConfig config_for(training::Schedule approach, double y0_value, int seed_index) const;
  void validate() const;
  static MinimaStudy from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct MinimaRow {
  training::Schedule approach = training::Schedule::physics_driven;
  double y0 = 0.0;
  std::uint64_t seed = 0;
  Outcome outcome;
};

/// Rows in approach-major, y0, seed order.
std::vector<MinimaRow> economical_minima_report(const MinimaStudy& study, const RunOptions& options = {},
                                                std::vector<training::RunTrace>* traces = nullptr);

/// Median min L_f over seeds for one (approach, y0) pair; throws ConfigError when there are no rows.
double median_min_L_f(const std::vector<MinimaRow>& rows, training::Schedule approach, double y0);

/// `approach,y0,seed,minLf,L2,class`
std::string minima_csv(const std::vector<MinimaRow>& rows);
std::string minima_markdown(const std::vector<MinimaRow>& rows, const MinimaStudy& study);

}  // namespace pinnfp::evaluation
