#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <set>

#include "pinnfp/error.hpp"
#include "pinnfp/evaluation/evaluation.hpp"
#include "pinnfp/evaluation/sweep.hpp"
#include "pinnfp/io/csv.hpp"
#include "pinnfp/io/hash.hpp"
#include "pinnfp/landscape/landscape.hpp"
#include "pinnfp/network/checkpoint.hpp"
#include "pinnfp/oracles/oracles.hpp"
#include "pinnfp/parallel.hpp"
#include "pinnfp/training/train.hpp"

namespace pinnfp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void log(const Options& o, int level, const std::string& msg) {
  if (o.verbosity >= level) std::cerr << msg << '\n';
}

/// Applies `fn` to every training-config object inside a command section.
template <typename Fn>
void for_each_train_config(const std::string& section, json& body, Fn fn) {
  if (section == "train") fn(body);
  if (section == "runs")
    for (json& r : body) fn(r.contains("config") ? r["config"] : r);
  if ((section == "sweep" || section == "minima") && body.contains("base")) fn(body["base"]);
  if (section == "landscape" && body.contains("train")) fn(body["train"]);
}

void apply_overrides(const std::string& section, json& body, const Options& o, std::optional<std::uint64_t> seed) {
  for_each_train_config(section, body, [&](json& c) {
    if (!c.is_object()) throw ConfigError("training config must be a JSON object");
    if (seed) c["seed"] = *seed;
    if (o.max_epochs) {
      const std::int64_t epochs = c.contains("epochs") ? c["epochs"].get<std::int64_t>() : 50000;
      if (epochs > *o.max_epochs) {
        c["epochs"] = *o.max_epochs;
        c.erase("checkpoints");
        c.erase("switch_epoch");
      }
    }
  });
  if (section == "landscape" && o.max_epochs && body.contains("train")) body.erase("checkpoints");
  if (section == "landscape" && seed) body["seed"] = *seed;
}

fs::path resolve(const Manifest& m, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : m.base_dir / path;
}

std::string trajectory_csv(const evaluation::Trajectory& pred, const evaluation::Trajectory& ref) {
  std::string out = "t,y,ydot,y_ref,ydot_ref\n";
  for (std::size_t i = 0; i < pred.t.size(); ++i)
    out += io::csv_row({io::format_double(pred.t[i]), io::format_double(pred.y[i]), io::format_double(pred.ydot[i]),
                        io::format_double(ref.y[i]), io::format_double(ref.ydot[i])});
  return out;
}

json outcome_json(const evaluation::Outcome& o) {
  json j{{"L2", o.l2},
         {"class", std::string(evaluation::to_string(o.cls))},
         {"min_L_f", o.min_L_f},
         {"borderline", o.borderline},
         {"diverged", o.diverged}};
  if (o.y_T) j["y_T"] = *o.y_T;
  if (o.ydot_T) j["ydot_T"] = *o.ydot_T;
  if (o.energy_T) j["energy_T"] = *o.energy_T;
  if (o.energy_0) j["energy_0"] = *o.energy_0;
  return j;
}

/// Run artifacts plus, for ODE systems, the prediction on the evaluation grid and its outcome.
void write_run(const fs::path& dir, const training::TrainConfig& config, const training::RunTrace& trace,
               bool force, double threshold = 0.15) {
  training::write_run_trace(dir, config, trace, force);
  const auto problem = training::make_problem(config);
  const auto& desc = problem.system->descriptor();
  if (desc.input_width() != 1) return;
  const auto times = evaluation::evaluation_times(desc.horizon);
  const auto pred = evaluation::predict_trajectory(problem, trace.final_params.values(), times);
  const auto ref = evaluation::reference_trajectory(desc, times);
  io::write_file_guarded(dir / "prediction.csv", trajectory_csv(pred, ref), force);
  const auto outcome = evaluation::evaluate_run(config, trace, threshold);
  io::write_file_guarded(dir / "outcome.json", outcome_json(outcome).dump(2) + "\n", force);
}

training::TrainOptions train_options(const Options& o, const std::string& label) {
  training::TrainOptions t;
  if (o.verbosity > 0) {
    t.report_every = 1000;
    t.progress = [&o, label](std::int64_t epoch, const training::LossBreakdown& l) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s epoch %lld  L=%.4e  L_f=%.4e  L_u=%.4e", label.c_str(),
                    static_cast<long long>(epoch), l.L, l.L_f, l.L_u);
      log(o, 1, buf);
    };
  }
  return t;
}

evaluation::RunOptions run_options(const Options& o) {
  evaluation::RunOptions r;
  r.threads = o.threads;
  if (o.verbosity > 0)
    r.progress = [&o](std::size_t done, std::size_t total) {
      log(o, 1, "finished run " + std::to_string(done) + "/" + std::to_string(total));
    };
  return r;
}

std::string y0_label(double y0) {
  std::string s = io::format_double(y0);
  std::replace(s.begin(), s.end(), '-', 'm');
  return s;
}

}  // namespace

Manifest load_manifest(const std::string& command, const Options& options) {
  if (!fs::exists(options.manifest)) throw ConfigError("manifest not found: " + options.manifest.string());
  json j;
  try {
    j = json::parse(io::read_file(options.manifest));
  } catch (const json::parse_error& e) {
    throw ConfigError("manifest " + options.manifest.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
  static const std::set<std::string> known{"experiment", "description", "seed", "output", "train",    "runs",
                                           "minima",     "sweep",       "landscape", "oracle"};
  for (const auto& [k, _] : j.items())
    if (!known.contains(k)) throw ConfigError("unknown manifest key '" + k + "'");

  std::vector<std::string> wanted;
  if (command == "train") wanted = {"train", "runs", "minima"};
  else wanted = {command};
  std::string section;
  for (const auto& w : wanted)
    if (j.contains(w)) {
      if (!section.empty()) throw ConfigError("manifest has both '" + section + "' and '" + w + "' sections");
      section = w;
    }
  if (section.empty()) throw ConfigError("manifest has no section for command '" + command + "'");

  Manifest m;
  m.experiment = j.value("experiment", options.manifest.stem().string());
  m.base_dir = fs::absolute(options.manifest).parent_path();
  std::optional<std::uint64_t> seed = options.seed;
  if (!seed && j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
  m.body = {{section, j.at(section)}};
  apply_overrides(section, m.body[section], options, seed);

  const fs::path root = options.out ? *options.out : fs::path(j.value("output", "runs"));
  const std::string hash = io::hex64(io::fnv1a64(command + "\n" + m.body.dump())).substr(0, 12);
  m.out_dir = root / (m.experiment + "-" + hash);
  return m;
}

int cmd_train(const Options& o) {
  const Manifest m = load_manifest("train", o);
  fs::create_directories(m.out_dir);
  io::write_file_guarded(m.out_dir / "manifest.json", m.body.dump(2) + "\n", o.force);

  if (m.body.contains("minima")) {
    const auto study = evaluation::MinimaStudy::from_json(m.body["minima"]);
    std::vector<training::RunTrace> traces;
    const auto rows = evaluation::economical_minima_report(study, run_options(o), &traces);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const auto config = study.config_for(r.approach, r.y0, static_cast<int>(r.seed - study.base.seed));
      const std::string name =
          std::string(training::to_string(r.approach)) + "_y0=" + y0_label(r.y0) + "_seed=" + std::to_string(r.seed);
      write_run(m.out_dir / "runs" / name, config, traces[i], o.force, study.threshold);
    }
    io::write_file_guarded(m.out_dir / "minima.csv", evaluation::minima_csv(rows), o.force);
    io::write_file_guarded(m.out_dir / "minima.md", evaluation::minima_markdown(rows, study), o.force);
    std::cout << evaluation::minima_markdown(rows, study);
    std::cout << "artifacts: " << m.out_dir.string() << '\n';
    return kExitOk;
  }

  std::vector<std::pair<std::string, training::TrainConfig>> runs;
  if (m.body.contains("train")) {
    runs.emplace_back("", training::TrainConfig::from_json(m.body["train"]));
  } else {
    const json& list = m.body["runs"];
    if (!list.is_array() || list.empty()) throw ConfigError("'runs' must be a non-empty array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const json& r = list[i];
      const std::string name = r.value("name", "run" + std::to_string(i));
      if (!names.insert(name).second) throw ConfigError("duplicate run name '" + name + "'");
      runs.emplace_back(name, training::TrainConfig::from_json(r.contains("config") ? r.at("config") : r));
    }
  }
  for (auto& [name, config] : runs)
    if (!config.data_file.empty()) config.data_file = resolve(m, config.data_file).string();

  std::vector<training::RunTrace> traces(runs.size());
  parallel_for(runs.size(), o.threads, [&](std::size_t i) {
    traces[i] = training::train(runs[i].second, train_options(o, runs[i].first.empty() ? "train" : runs[i].first));
  });
  int code = kExitOk;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path dir = runs[i].first.empty() ? m.out_dir : m.out_dir / runs[i].first;
    write_run(dir, runs[i].second, traces[i], o.force);
    const auto& t = traces[i];
    std::cout << (runs[i].first.empty() ? "run" : runs[i].first) << ": " << t.losses.size() << " epochs, min L_f "
              << io::format_double(t.min_L_f());
    if (t.diverged) {
      std::cout << ", diverged at epoch " << *t.diverged_epoch << " (" << t.divergence_message << ")";
      code = kExitDiverged;
    }
    std::cout << '\n';
  }
  std::cout << "artifacts: " << m.out_dir.string() << '\n';
  return code;
}

int cmd_sweep(const Options& o) {
  const Manifest m = load_manifest("sweep", o);
  const auto grid = evaluation::SweepGrid::from_json(m.body["sweep"]);
  fs::create_directories(m.out_dir);
  io::write_file_guarded(m.out_dir / "manifest.json", m.body.dump(2) + "\n", o.force);
  log(o, 1, "sweep: " + std::to_string(grid.cells().size()) + " cells x " + std::to_string(grid.seeds) + " seeds");
  const auto rows = evaluation::run_sweep(grid, run_options(o));
  const std::string md = evaluation::sweep_markdown(rows, grid.base.system, grid.cells().front().y0_in_degrees);
  io::write_file_guarded(m.out_dir / "sweep.csv", evaluation::sweep_csv(rows), o.force);
  io::write_file_guarded(m.out_dir / "sweep.md", md, o.force);
  std::cout << md << "artifacts: " << m.out_dir.string() << '\n';
  return kExitOk;
}

int cmd_landscape(const Options& o) {
  const Manifest m = load_manifest("landscape", o);
  const json& spec = m.body["landscape"];
  static const std::set<std::string> known{"run",       "train",  "checkpoints", "T",         "resolution",
                                           "margin",    "n_col",  "seed",        "threshold", "log_scale"};
  for (const auto& [k, _] : spec.items())
    if (!known.contains(k)) throw ConfigError("unknown landscape key '" + k + "'");
  if (spec.contains("run") == spec.contains("train"))
    throw ConfigError("landscape needs exactly one of 'run' (recorded run directory) or 'train' (config)");
  fs::create_directories(m.out_dir);
  io::write_file_guarded(m.out_dir / "manifest.json", m.body.dump(2) + "\n", o.force);

  fs::path run_dir;
  int code = kExitOk;
  if (spec.contains("train")) {
    const auto config = training::TrainConfig::from_json(spec["train"]);
    const auto trace = training::train(config, train_options(o, "train"));
    run_dir = m.out_dir / "run";
    write_run(run_dir, config, trace, o.force);
    if (trace.diverged) code = kExitDiverged;
  } else {
    run_dir = resolve(m, spec["run"].get<std::string>());
  }
  if (!fs::exists(run_dir / "config.json")) throw ConfigError("no recorded run at " + run_dir.string());
  const auto config = training::TrainConfig::from_json(json::parse(io::read_file(run_dir / "config.json")));
  const auto problem = training::make_problem(config);

  std::vector<std::int64_t> epochs =
      spec.contains("checkpoints") ? spec["checkpoints"].get<std::vector<std::int64_t>>() : config.checkpoint_epochs();
  if (epochs.size() < 3) throw ConfigError("landscape needs three checkpoints (initial, intermediate, final)");
  if (!spec.contains("checkpoints")) epochs = {epochs.front(), epochs[epochs.size() / 2], epochs.back()};
  if (epochs.size() != 3) throw ConfigError("'checkpoints' must list exactly three epochs");
  std::vector<network::ParameterVector> thetas;
  for (std::int64_t e : epochs) {
    const fs::path stem = run_dir / "checkpoints" / ("theta_" + std::to_string(e));
    if (!fs::exists(fs::path(stem).concat(".bin")))
      throw ConfigError("missing checkpoint for epoch " + std::to_string(e) + ": " + stem.string() + ".bin");
    thetas.push_back(network::load_checkpoint(stem).params);
  }
  const auto& t0 = thetas[0].values();
  const auto dirs = landscape::build_directions(t0, thetas[1].values(), thetas[2].values());
  const std::vector<landscape::Coordinates> marks{
      {0.0, 0.0}, landscape::project(thetas[1].values(), t0, dirs), landscape::project(thetas[2].values(), t0, dirs)};

  std::vector<int> res = spec.value("resolution", std::vector<int>{41, 41});
  if (res.size() != 2) throw ConfigError("'resolution' must be [n1, n2]");
  landscape::GridSettings settings;
  settings.n1 = res[0];
  settings.n2 = res[1];
  settings.extents = landscape::default_extents(marks, res[0], res[1], spec.value("margin", 0.25), marks[1]);
  settings.n_col = spec.value("n_col", std::size_t{1024});
  settings.seed = spec.value("seed", config.seed);
  settings.threads = o.threads;
  const std::vector<double> Ts =
      spec.contains("T") ? spec["T"].get<std::vector<double>>() : std::vector<double>{problem.horizon()};
  const bool truncating = spec.contains("threshold");
  const double threshold = truncating ? spec["threshold"].get<double>() : 0.0;
  const bool log_scale = spec.value("log_scale", false);

  json summary{{"run", run_dir.string()}, {"checkpoints", epochs}, {"log_scale", log_scale}, {"grids", json::array()}};
  const char* names[] = {"theta0", "theta_mid", "theta_final"};
  for (double T : Ts) {
    settings.T = T;
    log(o, 1, "landscape T=" + io::format_double(T));
    auto grid = landscape::evaluate_grid(problem, t0, dirs, settings);
    if (truncating) grid = landscape::truncate(grid, threshold);
    json meta = landscape::grid_metadata(grid);
    meta["log_scale"] = log_scale;
    meta["checkpoint_epochs"] = epochs;
    const auto [ai, aj] = grid.argmin();
    meta["argmin"] = {{"i", ai}, {"j", aj}, {"s1", grid.s1(ai)}, {"s2", grid.s2(aj)}, {"Lf", grid.raw_at(ai, aj)}};
    for (int k = 0; k < 3; ++k) {
      const auto [i, j] = grid.nearest(marks[static_cast<std::size_t>(k)]);
      json mk{{"s1", marks[static_cast<std::size_t>(k)].s1},
              {"s2", marks[static_cast<std::size_t>(k)].s2},
              {"cell", {i, j}},
              {"cell_Lf", grid.raw_at(i, j)},
              {"Lf", landscape::evaluate_point(problem, grid, marks[static_cast<std::size_t>(k)])}};
      if (i > 0 && j > 0 && i < grid.n1 - 1 && j < grid.n2 - 1)
        mk["local_min"] = std::string(landscape::to_string(landscape::local_min_test(grid, i, j)));
      meta["markers"][names[k]] = mk;
    }
    const std::string stem = "grid_T=" + io::format_double(T);
    io::write_file_guarded(m.out_dir / (stem + ".csv"), landscape::grid_csv(grid), o.force);
    io::write_file_guarded(m.out_dir / (stem + ".json"), meta.dump(2) + "\n", o.force);
    summary["grids"].push_back({{"T", T}, {"csv", stem + ".csv"}, {"metadata", stem + ".json"}});
    std::cout << stem << ": min L_f " << io::format_double(grid.raw_at(ai, aj)) << ", theta_mid "
              << meta["markers"]["theta_mid"].value("local_min", std::string("boundary")) << '\n';
  }
  io::write_file_guarded(m.out_dir / "landscape.json", summary.dump(2) + "\n", o.force);
  std::cout << "artifacts: " << m.out_dir.string() << '\n';
  return code;
}

int cmd_oracle(const Options& o) {
  const Manifest m = load_manifest("oracle", o);
  const json& spec = m.body["oracle"];
  static const std::set<std::string> known{"system", "params", "dt",          "n",         "nx",
                                           "T",      "snapshot_dt", "laplacian", "compare_nx"};
  for (const auto& [k, _] : spec.items())
    if (!known.contains(k)) throw ConfigError("unknown oracle key '" + k + "'");
  const std::string system = spec.value("system", std::string());
  const json params = spec.value("params", json::object());
  const auto model = systems::make_system(system, params);
  const auto& desc = model->descriptor();

  oracles::ReferenceSolution ref;
  json meta{{"system", desc.name}, {"parameters", desc.parameters}};
  if (desc.name == "pendulum") {
    ref = oracles::pendulum_reference(desc.parameter("y0"), desc.parameter("ydot0"), desc.horizon,
                                      spec.value("dt", 1e-3), desc.parameter("g"), desc.parameter("l"));
  } else if (desc.name == "toy") {
    ref = oracles::toy_reference(desc.parameter("y0"), desc.horizon, spec.value("n", std::size_t{1000}));
  } else if (desc.name == "allen-cahn") {
    oracles::AllenCahnOptions opt;
    opt.nx = spec.value("nx", opt.nx);
    opt.dt = spec.value("dt", opt.dt);
    opt.T = desc.horizon;
    opt.gamma1 = desc.parameter("gamma1");
    opt.gamma2 = desc.parameter("gamma2");
    opt.snapshot_dt = spec.value("snapshot_dt", opt.snapshot_dt);
    if (spec.contains("laplacian")) opt.laplacian = oracles::parse_laplacian(spec["laplacian"].get<std::string>());
    ref = oracles::allen_cahn_reference(opt);
    if (spec.contains("compare_nx")) {
      oracles::AllenCahnOptions fine = opt;
      fine.nx = spec["compare_nx"].get<int>();
      const double err = oracles::self_convergence_error(ref, oracles::allen_cahn_reference(fine));
      constexpr double kTolerance = 1e-4;
      meta["self_convergence"] = {
          {"nx", opt.nx}, {"compare_nx", fine.nx}, {"max_error", err}, {"tolerance", kTolerance}, {"converged", err <= kTolerance}};
      std::cout << "self-convergence nx " << opt.nx << " vs " << fine.nx << ": max error " << io::format_double(err)
                << (err <= kTolerance ? " (within " : " (exceeds ") << io::format_double(kTolerance) << ")\n";
    }
  } else {
    throw CapabilityError("no reference solver for system '" + desc.name + "'");
  }
  meta["reference"] = ref.metadata;
  meta["rows"] = ref.time_count() * ref.space_count();
  fs::create_directories(m.out_dir);
  io::write_file_guarded(m.out_dir / "manifest.json", m.body.dump(2) + "\n", o.force);
  io::write_file_guarded(m.out_dir / "reference.csv", oracles::reference_csv(ref), o.force);
  io::write_file_guarded(m.out_dir / "metadata.json", meta.dump(2) + "\n", o.force);
  std::cout << "reference: " << meta["rows"].get<std::size_t>() << " rows\nartifacts: " << m.out_dir.string() << '\n';
  return kExitOk;
}

int guarded(const char* command, int (*fn)(const Options&), const Options& options) {
  try {
    return fn(options);
  } catch (const DivergenceError& e) {
    std::cerr << "pinnfp " << command << ": diverged: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const Error& e) {
    std::cerr << "pinnfp " << command << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "pinnfp " << command << ": invalid manifest value: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "pinnfp " << command << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "pinnfp " << command << ": " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace pinnfp::cli
