#include "pinnfp/training/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pinnfp/error.hpp"
#include "pinnfp/io/hash.hpp"
#include "pinnfp/network/checkpoint.hpp"

namespace pinnfp::training {

using nlohmann::json;

std::string_view to_string(Schedule s) {
  switch (s) {
    case Schedule::physics_driven:
      return "physics-driven";
    case Schedule::vanilla:
      return "vanilla";
    case Schedule::data_guided:
      return "data-guided";
  }
  return "physics-driven";
}

Schedule parse_schedule(const std::string& s) {
  if (s == "physics-driven" || s == "physics_driven") return Schedule::physics_driven;
  if (s == "vanilla") return Schedule::vanilla;
  if (s == "data-guided" || s == "data_guided") return Schedule::data_guided;
  throw ConfigError("unknown schedule '" + s + "' (expected physics-driven, vanilla or data-guided)");
}

std::string_view to_string(Sampling s) { return s == Sampling::fixed ? "fixed" : "resample"; }

namespace {

Sampling parse_sampling(const std::string& s) {
  if (s == "fixed") return Sampling::fixed;
  if (s == "resample" || s == "resample-each-epoch") return Sampling::resample;
  throw ConfigError("unknown sampling '" + s + "' (expected fixed or resample)");
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::int64_t get_count(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() && !(v.is_number_float() && v.get<double>() == std::floor(v.get<double>())))
    throw ConfigError(std::string("config key '") + key + "' must be an integer");
  return v.is_number_integer() ? v.get<std::int64_t>() : static_cast<std::int64_t>(v.get<double>());
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (n_f < 1) throw ConfigError("n_f must be >= 1");
  if (n_ic < 0 || n_bc < 0 || n_data < 0) throw ConfigError("point counts must be non-negative");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("learning rate must be positive");
  if (lr_decay && (!(lr_decay->rate > 0.0) || !(lr_decay->step > 0.0)))
    throw ConfigError("lr_decay needs rate > 0 and step > 0");
  if (schedule == Schedule::data_guided) {
    const auto sw = effective_switch_epoch();
    if (sw < 0 || sw >= epochs) throw ConfigError("switch_epoch must satisfy 0 <= switch_epoch < epochs");
    if (n_data < 1 && data_file.empty()) throw ConfigError("data-guided schedule needs n_data >= 1");
  } else if (switch_epoch >= 0) {
    throw ConfigError("switch_epoch is only meaningful for the data-guided schedule");
  }
  if (schedule == Schedule::vanilla && hard_ic) throw ConfigError("vanilla schedule uses a soft initial condition");
  for (auto c : checkpoints)
    if (c < 0 || c > epochs) throw ConfigError("checkpoint epochs must lie in [0, epochs]");
  network.validate();
}

std::vector<std::int64_t> TrainConfig::checkpoint_epochs() const {
  std::set<std::int64_t> s(checkpoints.begin(), checkpoints.end());
  if (checkpoints.empty()) s = {0, epochs / 2, epochs};
  return {s.begin(), s.end()};
}

std::int64_t TrainConfig::effective_switch_epoch() const { return switch_epoch >= 0 ? switch_epoch : epochs / 2; }

json TrainConfig::to_json() const {
  json net = {{"hidden", network.hidden_layers},
              {"activation", network::to_string(network.activation)},
              {"init", network::to_string(network.initializer)}};
  json j = {{"system", system},
            {"params", params},
            {"network", net},
            {"lambda", lambda},
            {"lr", lr},
            {"lr_decay", lr_decay ? json{{"rate", lr_decay->rate}, {"step", lr_decay->step}} : json(nullptr)},
            {"epochs", epochs},
            {"n_f", n_f},
            {"n_ic", n_ic},
            {"n_bc", n_bc},
            {"n_data", n_data},
            {"sampling", to_string(sampling)},
            {"schedule", to_string(schedule)},
            {"hard_ic", hard_ic},
            {"seed", seed},
            {"checkpoints", checkpoint_epochs()}};
  if (schedule == Schedule::data_guided) j["switch_epoch"] = effective_switch_epoch();
  if (!data_file.empty()) j["data_file"] = data_file;
  return j;
}

TrainConfig TrainConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  static const std::set<std::string> known{"system", "params",   "network", "lambda",  "lr",         "lr_decay",
                                           "epochs", "n_f",      "n_ic",    "n_bc",    "n_data",     "sampling",
                                           "schedule", "switch_epoch", "hard_ic", "seed", "checkpoints", "data_file"};
  for (const auto& [k, _] : j.items())
    if (!known.contains(k)) throw ConfigError("unknown training config key '" + k + "'");

  TrainConfig c;
  if (j.contains("system")) c.system = get<std::string>(j, "system");
  if (c.system == "allen_cahn") c.system = "allen-cahn";
  if (c.system == "navier_stokes") c.system = "navier-stokes";
  if (c.system == "allen-cahn") {
    c.n_f = 1024;
    c.n_ic = 128;
    c.n_bc = 128;
    c.n_data = 512;
    c.sampling = Sampling::resample;
  } else if (c.system == "navier-stokes") {
    c.n_f = 1024;
    c.n_ic = 0;
    c.n_data = 1024;
    c.sampling = Sampling::resample;
  }
  if (c.system == "pendulum") c.n_data = 100;

  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ConfigError("'params' must be an object");
    c.params = j.at("params");
  }
  if (j.contains("network")) {
    const json& n = j.at("network");
    if (!n.is_object()) throw ConfigError("'network' must be an object");
    json spec_json = n;
    if (spec_json.contains("init") && !spec_json.contains("initializer")) {
      spec_json["initializer"] = spec_json["init"];
      spec_json.erase("init");
    }
    c.network = network::spec_from_json(spec_json);
  }
  if (j.contains("lambda")) c.lambda = get<double>(j, "lambda");
  if (j.contains("lr")) c.lr = get<double>(j, "lr");
  if (j.contains("lr_decay") && !j.at("lr_decay").is_null()) {
    const json& d = j.at("lr_decay");
    LrDecay decay;
    if (d.contains("rate")) decay.rate = get<double>(d, "rate");
    if (d.contains("step")) decay.step = get<double>(d, "step");
    c.lr_decay = decay;
  }
  if (j.contains("epochs")) c.epochs = get_count(j, "epochs");
  if (j.contains("n_f")) c.n_f = get_count(j, "n_f");
  if (j.contains("n_ic")) c.n_ic = get_count(j, "n_ic");
  if (j.contains("n_bc")) c.n_bc = get_count(j, "n_bc");
  if (j.contains("n_data")) c.n_data = get_count(j, "n_data");
  if (j.contains("sampling")) c.sampling = parse_sampling(get<std::string>(j, "sampling"));
  if (j.contains("schedule")) c.schedule = parse_schedule(get<std::string>(j, "schedule"));
  if (j.contains("switch_epoch")) c.switch_epoch = get_count(j, "switch_epoch");
  if (j.contains("hard_ic")) c.hard_ic = get<bool>(j, "hard_ic");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("checkpoints")) c.checkpoints = get<std::vector<std::int64_t>>(j, "checkpoints");
  if (j.contains("data_file")) c.data_file = get<std::string>(j, "data_file");
  c.validate();
  return c;
}

std::uint64_t TrainConfig::hash() const { return io::fnv1a64(to_json().dump()); }

}  // namespace pinnfp::training
