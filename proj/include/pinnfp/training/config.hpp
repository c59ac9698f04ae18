#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pinnfp/network/spec.hpp"

namespace pinnfp::training {

enum class Schedule { physics_driven, vanilla, data_guided };
enum class Sampling { fixed, resample };

std::string_view to_string(Schedule s);
std::string_view to_string(Sampling s);
Schedule parse_schedule(const std::string& s);

struct LrDecay {
  double rate = 0.9;
  double step = 1000.0;
  bool operator==(const LrDecay&) const = default;
};

/// Everything that defines one training run.
///
/// JSON keys: system, params (system parameters), network {arch | hidden, activation, init},
/// lambda, lr, lr_decay {rate, step} | null, epochs, n_f, n_ic, n_bc, n_data, sampling
/// (fixed | resample), schedule (physics-driven | vanilla | data-guided), switch_epoch,
/// hard_ic, seed, checkpoints, data_file. Unknown keys are rejected.
struct TrainConfig {
  std::string system = "toy";
  nlohmann::json params = nlohmann::json::object();
  network::NetworkSpec network;  // widths are filled from the system by make_problem()
  double lambda = 1.0;
  double lr = 1e-3;
  std::optional<LrDecay> lr_decay;
  std::int64_t epochs = 50000;
  std::int64_t n_f = 64;
  std::int64_t n_ic = 1;
  std::int64_t n_bc = 0;
  std::int64_t n_data = 10;
  Sampling sampling = Sampling::fixed;
  Schedule schedule = Schedule::physics_driven;
  std::int64_t switch_epoch = -1;  // data-guided only; defaults to epochs / 2
  bool hard_ic = false;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> checkpoints;  // empty means {0, epochs/2, epochs}
  std::string data_file;

  /// Throws ConfigError on violated invariants (epochs >= 1, counts >= 1, switch_epoch < epochs, ...).
  void validate() const;
  std::vector<std::int64_t> checkpoint_epochs() const;
  std::int64_t effective_switch_epoch() const;

  nlohmann::json to_json() const;
  /// Applies per-system defaults (Allen-Cahn: N_f=1024, N_IC=N_BC=128, resampling) before reading keys.
  static TrainConfig from_json(const nlohmann::json& j);

  /// FNV-1a over the canonical JSON text.
  std::uint64_t hash() const;
};

}  // namespace pinnfp::training
