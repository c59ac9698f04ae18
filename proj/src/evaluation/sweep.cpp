#include "pinnfp/evaluation/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>

#include "pinnfp/error.hpp"
#include "pinnfp/io/csv.hpp"
#include "pinnfp/parallel.hpp"
#include "pinnfp/systems/systems.hpp"
#include "pinnfp/training/train.hpp"

namespace pinnfp::evaluation {

using nlohmann::json;

namespace {

template <typename T>
std::vector<T> list(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  const json& v = j.at(key);
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const json::exception&) {
    throw ConfigError(std::string("grid axis '") + key + "' has the wrong type");
  }
}

void check_keys(const json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (!known.contains(k)) throw ConfigError("unknown " + std::string(what) + " key '" + k + "'");
}

int read_seeds(const json& j) {
  if (!j.contains("seeds")) return -1;
  if (!j.at("seeds").is_number_integer()) throw ConfigError("'seeds' must be an integer");
  return j.at("seeds").get<int>();
}

/// Initial condition as written in the base params, with its unit.
std::pair<double, bool> base_y0(const training::TrainConfig& base) {
  if (base.params.contains("y0_deg")) return {base.params.at("y0_deg").get<double>(), true};
  const auto system = systems::make_system(base.system, base.params);
  const auto& desc = system->descriptor();
  if (!desc.parameters.contains("y0")) return {std::numeric_limits<double>::quiet_NaN(), false};
  return {desc.parameter("y0"), false};
}

void set_y0(nlohmann::json& params, double y0, bool degrees) {
  params.erase("y0");
  params.erase("y0_deg");
  params[degrees ? "y0_deg" : "y0"] = y0;
}

/// Shared fan-out for sweep-style studies: runs job(i) for i < n and reports progress.
template <typename Row, typename Job>
std::vector<Row> run_jobs(std::size_t n, const RunOptions& options, std::vector<training::RunTrace>* traces, Job job) {
  std::vector<Row> rows(n);
  if (traces) traces->assign(n, {});
  std::mutex m;
  std::size_t done = 0;
  parallel_for(n, std::max(1u, options.threads), [&](std::size_t i) {
    training::RunTrace trace;
    rows[i] = job(i, trace);
    if (traces) (*traces)[i] = std::move(trace);
    if (options.progress) {
      std::lock_guard lock(m);
      options.progress(++done, n);
    }
  });
  return rows;
}

Outcome train_and_score(const training::TrainConfig& config, double threshold, training::RunTrace& trace) {
  trace = training::train(config);
  return evaluate_run(config, trace, threshold);
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f", v);
  return buf;
}

std::string sci(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw ConfigError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// ---- sweep grid ------------------------------------------------------------------------------

std::vector<SweepCell> SweepGrid::cells() const {
  const auto system = systems::make_system(base.system, base.params);
  const auto [y_base, deg_base] = base_y0(base);

  const std::vector<double> Ts = T.empty() ? std::vector<double>{system->descriptor().horizon} : T;
  const std::vector<double> ys = y0.empty() ? std::vector<double>{y_base} : y0;
  const bool degrees = y0.empty() ? deg_base : y0_in_degrees;
  const std::vector<std::string> archs = arch.empty() ? std::vector<std::string>{base.network.arch_label()} : arch;
  const std::vector<std::string> acts =
      activation.empty() ? std::vector<std::string>{std::string(network::to_string(base.network.activation))}
                         : activation;
  const std::vector<double> alphas = alpha.empty() ? std::vector<double>{base.lr} : alpha;
  const std::vector<std::int64_t> ncs = n_c.empty() ? std::vector<std::int64_t>{base.n_f} : n_c;
  const std::vector<double> lambdas = lambda.empty() ? std::vector<double>{base.lambda} : lambda;
  const std::vector<std::string> inits =
      init.empty() ? std::vector<std::string>{std::string(network::to_string(base.network.initializer))} : init;

  std::vector<SweepCell> out;
  for (double t : Ts)
    for (double y : ys)
      for (const auto& a : archs)
        for (const auto& act : acts)
          for (double al : alphas)
            for (std::int64_t nc : ncs)
              for (double lam : lambdas)
                for (const auto& in : inits) out.push_back({t, y, degrees, a, act, al, nc, lam, in});
  return out;
}

training::TrainConfig SweepGrid::config_for(const SweepCell& cell, int seed_index) const {
  training::TrainConfig c = base;
  c.params["T"] = cell.T;
  if (!std::isnan(cell.y0)) set_y0(c.params, cell.y0, cell.y0_in_degrees);
  c.network.hidden_layers = network::parse_arch(cell.arch);
  c.network.activation = network::parse_activation(cell.activation);
  c.network.initializer = network::parse_initializer(cell.init);
  c.lr = cell.alpha;
  c.n_f = cell.n_c;
  c.lambda = cell.lambda;
  c.seed = base.seed + static_cast<std::uint64_t>(seed_index);
  c.validate();
  return c;
}

void SweepGrid::validate() const {
  if (seeds < 1) throw ConfigError("a sweep needs at least one seed");
  if (!(threshold > 0.0)) throw ConfigError("success threshold must be positive");
  if (base.system != "toy" && base.system != "pendulum")
    throw CapabilityError("sweeps are scored against ODE references (toy or pendulum)");
  for (const SweepCell& cell : cells()) config_for(cell, 0);
}

SweepGrid SweepGrid::from_json(const json& j) {
  check_keys(j, {"base", "grid", "seeds", "threshold"}, "sweep");
  SweepGrid g;
  if (j.contains("base")) g.base = training::TrainConfig::from_json(j.at("base"));
  if (j.contains("grid")) {
    const json& a = j.at("grid");
    check_keys(a, {"T", "y0", "y0_deg", "arch", "activation", "alpha", "Nc", "lambda", "init"}, "sweep grid");
    if (a.contains("y0") && a.contains("y0_deg")) throw ConfigError("give either 'y0' or 'y0_deg', not both");
    g.T = list<double>(a, "T");
    g.y0 = list<double>(a, a.contains("y0_deg") ? "y0_deg" : "y0");
    g.y0_in_degrees = a.contains("y0_deg");
    g.arch = list<std::string>(a, "arch");
    g.activation = list<std::string>(a, "activation");
    g.alpha = list<double>(a, "alpha");
    g.n_c = list<std::int64_t>(a, "Nc");
    g.lambda = list<double>(a, "lambda");
    g.init = list<std::string>(a, "init");
  }
  if (const int s = read_seeds(j); s >= 0) g.seeds = s;
  if (j.contains("threshold")) g.threshold = j.at("threshold").get<double>();
  g.validate();
  return g;
}

json SweepGrid::to_json() const {
  json grid = json::object();
  if (!T.empty()) grid["T"] = T;
  if (!y0.empty()) grid[y0_in_degrees ? "y0_deg" : "y0"] = y0;
  if (!arch.empty()) grid["arch"] = arch;
  if (!activation.empty()) grid["activation"] = activation;
  if (!alpha.empty()) grid["alpha"] = alpha;
  if (!n_c.empty()) grid["Nc"] = n_c;
  if (!lambda.empty()) grid["lambda"] = lambda;
  if (!init.empty()) grid["init"] = init;
  return {{"base", base.to_json()}, {"grid", grid}, {"seeds", seeds}, {"threshold", threshold}};
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid, const RunOptions& options,
                                std::vector<training::RunTrace>* traces) {
  grid.validate();
  const auto cells = grid.cells();
  const std::size_t per_cell = static_cast<std::size_t>(grid.seeds);
  return run_jobs<SweepRow>(cells.size() * per_cell, options, traces, [&](std::size_t i, training::RunTrace& trace) {
    const SweepCell& cell = cells[i / per_cell];
    const auto config = grid.config_for(cell, static_cast<int>(i % per_cell));
    return SweepRow{cell, config.seed, train_and_score(config, grid.threshold, trace)};
  });
}

std::vector<CellSummary> summarize(const std::vector<SweepRow>& rows) {
  std::vector<CellSummary> out;
  std::vector<std::vector<double>> minima;
  for (const SweepRow& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const CellSummary& s) { return s.cell == r.cell; });
    if (it == out.end()) {
      out.push_back({.cell = r.cell});
      minima.emplace_back();
      it = out.end() - 1;
    }
    CellSummary& s = *it;
    ++s.runs;
    switch (r.outcome.cls) {
      case OutcomeClass::success:
        s.success_pct += 1.0;
        break;
      case OutcomeClass::stable_fp:
        s.stable_pct += 1.0;
        break;
      case OutcomeClass::unstable_fp:
        s.unstable_pct += 1.0;
        break;
    }
    if (r.outcome.borderline) ++s.borderline;
    if (r.outcome.diverged) ++s.diverged;
    minima[static_cast<std::size_t>(it - out.begin())].push_back(r.outcome.min_L_f);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    CellSummary& s = out[i];
    const double scale = 100.0 / s.runs;
    s.success_pct *= scale;
    s.stable_pct *= scale;
    s.unstable_pct *= scale;
    s.median_min_L_f = median(minima[i]);
    s.best_min_L_f = *std::min_element(minima[i].begin(), minima[i].end());
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "T,y0,arch,activation,alpha,Nc,lambda,init,seed,L2,class,minLf\n";
  for (const SweepRow& r : rows) {
    const SweepCell& c = r.cell;
    out += io::csv_row({io::format_double(c.T), io::format_double(c.y0), c.arch, c.activation,
                        io::format_double(c.alpha), std::to_string(c.n_c), io::format_double(c.lambda), c.init,
                        std::to_string(r.seed), io::format_double(r.outcome.l2),
                        std::string(to_string(r.outcome.cls)), io::format_double(r.outcome.min_L_f)});
  }
  return out;
}

std::string sweep_markdown(const std::vector<SweepRow>& rows, const std::string& system, bool y0_in_degrees) {
  const bool pendulum = system == "pendulum";
  std::ostringstream os;
  os << "| T | y0" << (y0_in_degrees ? " (deg)" : "") << " | arch | activation | alpha | Nc | lambda | init | runs | "
     << (pendulum ? "success / stable-fp / unstable-fp (%)" : "success (%)")
     << " | median min L_f | best min L_f | flagged |\n";
  os << "|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const CellSummary& s : summarize(rows)) {
    const SweepCell& c = s.cell;
    std::string flagged;
    if (s.borderline) flagged += std::to_string(s.borderline) + " borderline";
    if (s.diverged) flagged += (flagged.empty() ? "" : ", ") + std::to_string(s.diverged) + " diverged";
    if (flagged.empty()) flagged = "-";
    os << "| " << io::format_double(c.T) << " | " << io::format_double(c.y0) << " | " << c.arch << " | "
       << c.activation << " | " << io::format_double(c.alpha) << " | " << c.n_c << " | "
       << io::format_double(c.lambda) << " | " << c.init << " | " << s.runs << " | ";
    if (pendulum)
      os << pct(s.success_pct) << " / " << pct(s.stable_pct) << " / " << pct(s.unstable_pct);
    else
      os << pct(s.success_pct);
    os << " | " << sci(s.median_min_L_f) << " | " << sci(s.best_min_L_f) << " | " << flagged << " |\n";
  }
  return os.str();
}

// ---- economical minima -----------------------------------------------------------------------

training::TrainConfig MinimaStudy::config_for(training::Schedule approach, double y0_value, int seed_index) const {
  training::TrainConfig c = base;
  set_y0(c.params, y0_value, y0_in_degrees);
  c.schedule = approach;
  if (approach != training::Schedule::data_guided) c.switch_epoch = -1;
  c.seed = base.seed + static_cast<std::uint64_t>(seed_index);
  c.validate();
  return c;
}

void MinimaStudy::validate() const {
  if (seeds < 1) throw ConfigError("a minima study needs at least one seed");
  if (y0.empty()) throw ConfigError("a minima study needs at least one initial condition");
  if (approaches.empty()) throw ConfigError("a minima study needs at least one approach");
  if (base.system != "toy" && base.system != "pendulum")
    throw CapabilityError("minima studies are scored against ODE references (toy or pendulum)");
  for (auto a : approaches)
    for (double y : y0) config_for(a, y, 0);
}

MinimaStudy MinimaStudy::from_json(const json& j) {
  check_keys(j, {"base", "y0", "y0_deg", "approaches", "seeds", "threshold"}, "minima study");
  if (j.contains("y0") && j.contains("y0_deg")) throw ConfigError("give either 'y0' or 'y0_deg', not both");
  MinimaStudy s;
  if (j.contains("base")) s.base = training::TrainConfig::from_json(j.at("base"));
  s.y0_in_degrees = j.contains("y0_deg");
  s.y0 = list<double>(j, s.y0_in_degrees ? "y0_deg" : "y0");
  if (j.contains("approaches")) {
    s.approaches.clear();
    for (const auto& a : list<std::string>(j, "approaches")) s.approaches.push_back(training::parse_schedule(a));
  }
  if (const int n = read_seeds(j); n >= 0) s.seeds = n;
  if (j.contains("threshold")) s.threshold = j.at("threshold").get<double>();
  s.validate();
  return s;
}

json MinimaStudy::to_json() const {
  json a = json::array();
  for (auto x : approaches) a.push_back(std::string(training::to_string(x)));
  return {{"base", base.to_json()},
          {y0_in_degrees ? "y0_deg" : "y0", y0},
          {"approaches", a},
          {"seeds", seeds},
          {"threshold", threshold}};
}

std::vector<MinimaRow> economical_minima_report(const MinimaStudy& study, const RunOptions& options,
                                                std::vector<training::RunTrace>* traces) {
  study.validate();
  const std::size_t per_y0 = static_cast<std::size_t>(study.seeds);
  const std::size_t per_approach = per_y0 * study.y0.size();
  const std::size_t n = per_approach * study.approaches.size();
  return run_jobs<MinimaRow>(n, options, traces, [&](std::size_t i, training::RunTrace& trace) {
    const auto approach = study.approaches[i / per_approach];
    const double y0 = study.y0[(i % per_approach) / per_y0];
    const auto config = study.config_for(approach, y0, static_cast<int>(i % per_y0));
    return MinimaRow{approach, y0, config.seed, train_and_score(config, study.threshold, trace)};
  });
}

double median_min_L_f(const std::vector<MinimaRow>& rows, training::Schedule approach, double y0) {
  std::vector<double> v;
  for (const MinimaRow& r : rows)
    if (r.approach == approach && r.y0 == y0) v.push_back(r.outcome.min_L_f);
  if (v.empty()) throw ConfigError("no runs for the requested approach and initial condition");
  return median(std::move(v));
}

std::string minima_csv(const std::vector<MinimaRow>& rows) {
  std::string out = "approach,y0,seed,minLf,L2,class\n";
  for (const MinimaRow& r : rows)
    out += io::csv_row({std::string(training::to_string(r.approach)), io::format_double(r.y0), std::to_string(r.seed),
                        io::format_double(r.outcome.min_L_f), io::format_double(r.outcome.l2),
                        std::string(to_string(r.outcome.cls))});
  return out;
}

std::string minima_markdown(const std::vector<MinimaRow>& rows, const MinimaStudy& study) {
  std::ostringstream os;
  os << "| approach | y0" << (study.y0_in_degrees ? " (deg)" : "") << " | runs | median min L_f | success (%) |\n";
  os << "|---|---|---|---|---|\n";
  for (auto a : study.approaches)
    for (double y : study.y0) {
      int runs = 0, ok = 0;
      for (const MinimaRow& r : rows)
        if (r.approach == a && r.y0 == y) {
          ++runs;
          ok += r.outcome.cls == OutcomeClass::success;
        }
      if (runs == 0) continue;
      os << "| " << training::to_string(a) << " | " << io::format_double(y) << " | " << runs << " | "
         << sci(median_min_L_f(rows, a, y)) << " | " << pct(100.0 * ok / runs) << " |\n";
    }
  return os.str();
}

}  // namespace pinnfp::evaluation
