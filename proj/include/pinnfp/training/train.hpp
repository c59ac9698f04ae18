#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pinnfp/network/ansatz.hpp"
#include "pinnfp/network/spec.hpp"
#include "pinnfp/oracles/oracles.hpp"
#include "pinnfp/systems/systems.hpp"
#include "pinnfp/training/adam.hpp"
#include "pinnfp/training/config.hpp"
#include "pinnfp/training/loss.hpp"

namespace pinnfp::training {

/// System, ansatz and concrete network spec (widths and seed filled in) for a config.
struct Problem {
  std::shared_ptr<const systems::SystemModel> system;
  std::shared_ptr<const network::Ansatz> ansatz;
  network::NetworkSpec spec;

  double horizon() const { return system->descriptor().horizon; }
  LossModel loss_model() const { return LossModel(system, ansatz, spec); }
};

Problem make_problem(const TrainConfig& config);

/// Draws the loss terms of a run: collocation residuals, IC/BC constraints and oracle labels.
class TermSampler {
 public:
  TermSampler(const TrainConfig& config, const Problem& problem);

  LossTerm residual(Rng& rng) const;
  /// Initial and boundary terms still needed given the ansatz (a hard IC removes the value term).
  std::vector<LossTerm> constraints(Rng& rng) const;
  /// Labeled reference samples; empty term when the config has none.
  LossTerm data(Rng& rng) const;

 private:
  const TrainConfig& config_;
  const Problem& problem_;
};

/// Labeled reference values for the data-guided schedule: equispaced times for ODEs, random grid
/// nodes of the reference solver for Allen-Cahn, rows of `data_file` for Navier-Stokes.
LossTerm reference_labels(const TrainConfig& config, const Problem& problem, Rng& rng);

struct RunTrace {
  std::vector<LossBreakdown> losses;  // row k: loss at the parameters after k steps
  std::vector<std::pair<std::int64_t, network::ParameterVector>> checkpoints;
  network::NetworkSpec spec;
  network::ParameterVector final_params;  // last finite parameters
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  bool diverged = false;
  std::optional<std::int64_t> diverged_epoch;
  std::string divergence_message;

  /// Minimum recorded L_f (+inf for an empty trace).
  double min_L_f() const;
  /// Checkpoint for `epoch`, or nullptr.
  const network::ParameterVector* checkpoint(std::int64_t epoch) const;
};

struct TrainOptions {
  double divergence_threshold = 1e12;
  std::int64_t report_every = 0;  // 0 disables progress callbacks
  std::function<void(std::int64_t epoch, const LossBreakdown&)> progress;
};

/// Runs the configured schedule with full-batch Adam. A non-finite loss, a loss above the
/// divergence threshold or a non-finite update stops the run with `diverged` set; the trace
/// up to that point is kept.
RunTrace train(const TrainConfig& config, const TrainOptions& options = {});

/// Writes losses.csv (`epoch,L_f,L_u,L`), checkpoints/theta_<epoch>.{bin,json}, config.json and
/// metadata.json (seed, config hash, min L_f, wall time). Existing CSV/binary files with different
/// content are not overwritten unless `force` is set.
void write_run_trace(const std::filesystem::path& dir, const TrainConfig& config, const RunTrace& trace,
                     bool force = false);

std::string losses_csv(const RunTrace& trace);

}  // namespace pinnfp::training
