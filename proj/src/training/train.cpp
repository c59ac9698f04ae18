#include "pinnfp/training/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "pinnfp/error.hpp"
#include "pinnfp/io/csv.hpp"
#include "pinnfp/io/hash.hpp"
#include "pinnfp/network/checkpoint.hpp"

namespace pinnfp::training {

namespace d = systems::d;
using nlohmann::json;

namespace {

// Random-stream tags.
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kDataStream = 2;

bool is_ode(const systems::SystemDescriptor& s) { return s.spatial_bounds.empty(); }

}  // namespace

Problem make_problem(const TrainConfig& config) {
  Problem p;
  p.system = systems::make_system(config.system, config.params);
  const auto& desc = p.system->descriptor();
  if (config.hard_ic) {
    if (!is_ode(desc)) throw CapabilityError("hard initial conditions are available for the ODE systems only");
    p.ansatz = std::make_shared<network::HardIcAnsatz>(desc.parameter("y0"));
  } else if (desc.name == "navier-stokes") {
    p.ansatz = std::make_shared<network::StreamFunctionAnsatz>();
  } else {
    p.ansatz = std::make_shared<network::IdentityAnsatz>(desc.field_count);
  }
  p.spec = config.network;
  p.spec.input_width = desc.input_width();
  p.spec.output_width = p.ansatz->network_outputs();
  p.spec.seed = config.seed;
  p.spec.validate();
  return p;
}

TermSampler::TermSampler(const TrainConfig& config, const Problem& problem) : config_(config), problem_(problem) {}

LossTerm TermSampler::residual(Rng& rng) const {
  const auto& desc = problem_.system->descriptor();
  return residual_term(
      sample_collocation(desc.horizon, desc.spatial_bounds, static_cast<std::size_t>(config_.n_f), rng));
}

std::vector<LossTerm> TermSampler::constraints(Rng& rng) const {
  const auto& desc = problem_.system->descriptor();
  std::vector<LossTerm> out;
  if (is_ode(desc)) {
    // One IC point at t = 0: y(0) = y0 unless hard-wired, plus ydot(0) for second-order systems.
    LossTerm ic;
    ic.kind = LossTerm::Kind::targets;
    ic.name = "ic";
    ic.points = Eigen::MatrixXd::Zero(1, 1);
    std::vector<double> targets;
    if (!config_.hard_ic) {
      ic.components.push_back({0, d::value});
      targets.push_back(desc.parameter("y0"));
    }
    if (desc.name == "pendulum") {
      ic.components.push_back({0, d::t});
      targets.push_back(desc.parameter("ydot0"));
    }
    if (ic.components.empty()) return out;
    ic.values = Eigen::Map<const Eigen::MatrixXd>(targets.data(), static_cast<Eigen::Index>(targets.size()), 1);
    out.push_back(std::move(ic));
    return out;
  }
  if (desc.name == "allen-cahn") {
    const auto [lo, hi] = desc.spatial_bounds[0];
    if (config_.n_ic > 0) {
      LossTerm ic;
      ic.kind = LossTerm::Kind::targets;
      ic.name = "ic";
      ic.points.resize(2, config_.n_ic);
      ic.values.resize(1, config_.n_ic);
      ic.components = {{0, d::value}};
      for (Eigen::Index i = 0; i < ic.points.cols(); ++i) {
        const double x = rng.uniform(lo, hi);
        ic.points(0, i) = 0.0;
        ic.points(1, i) = x;
        double u0 = 0.0;
        problem_.system->initial_condition(std::span<const double>(&x, 1), std::span<double>(&u0, 1));
        ic.values(0, i) = u0;
      }
      out.push_back(std::move(ic));
    }
    if (config_.n_bc > 0) {
      // Periodic in x: match u and u_x at x = -1 and x = 1.
      LossTerm bc;
      bc.kind = LossTerm::Kind::periodic;
      bc.name = "bc";
      bc.points.resize(2, config_.n_bc);
      bc.partners.resize(2, config_.n_bc);
      bc.components = {{0, d::value}, {0, d::x}};
      for (Eigen::Index i = 0; i < bc.points.cols(); ++i) {
        const double t = rng.uniform(0.0, desc.horizon);
        bc.points(0, i) = t;
        bc.points(1, i) = lo;
        bc.partners(0, i) = t;
        bc.partners(1, i) = hi;
      }
      out.push_back(std::move(bc));
    }
  }
  return out;
}

LossTerm TermSampler::data(Rng& rng) const { return reference_labels(config_, problem_, rng); }

LossTerm reference_labels(const TrainConfig& config, const Problem& problem, Rng& rng) {
  const auto& desc = problem.system->descriptor();
  LossTerm term;
  term.kind = LossTerm::Kind::targets;
  term.name = "data";
  const double T = desc.horizon;
  const auto n = static_cast<Eigen::Index>(config.n_data);
  if (desc.name == "toy" || desc.name == "pendulum") {
    if (n < 1) return term;
    term.components = {{0, d::value}};
    term.points.resize(1, n);
    term.values.resize(1, n);
    std::optional<oracles::ReferenceSolution> ref;
    if (desc.name == "pendulum")
      ref = oracles::pendulum_reference(desc.parameter("y0"), desc.parameter("ydot0"), T, 1e-3, desc.parameter("g"),
                                        desc.parameter("l"));
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : T * static_cast<double>(i) / static_cast<double>(n - 1);
      term.points(0, i) = t;
      try {
        term.values(0, i) = ref ? ref->interpolate(t, 0) : oracles::toy_analytic(desc.parameter("y0"), t);
      } catch (const DomainError& e) {
        throw ConfigError(std::string("no reference labels: ") + e.what());
      }
    }
    return term;
  }
  if (desc.name == "allen-cahn") {
    if (n < 1) return term;
    oracles::AllenCahnOptions opt;
    opt.T = T;
    opt.gamma1 = desc.parameter("gamma1");
    opt.gamma2 = desc.parameter("gamma2");
    const auto ref = oracles::allen_cahn_reference(opt);
    term.components = {{0, d::value}};
    term.points.resize(2, n);
    term.values.resize(1, n);
    const std::size_t nt = ref.time_count(), nx = ref.space_count();
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ti = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(nt)) % nt;
      const auto xi = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(nx)) % nx;
      term.points(0, i) = ref.times[ti];
      term.points(1, i) = ref.space[xi];
      term.values(0, i) = ref.at(ti, xi, 0);
    }
    return term;
  }
  // Navier-Stokes: velocity labels from a snapshot file.
  if (config.data_file.empty()) return term;
  const auto data = oracles::load_field_snapshots(config.data_file);
  if (data.empty()) throw ConfigError("snapshot file '" + config.data_file + "' has no records");
  const auto count = n > 0 ? std::min<Eigen::Index>(n, static_cast<Eigen::Index>(data.size()))
                           : static_cast<Eigen::Index>(data.size());
  term.components = {{0, d::value}, {1, d::value}};
  term.points.resize(3, count);
  term.values.resize(2, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& r = count == static_cast<Eigen::Index>(data.size())
                        ? data[static_cast<std::size_t>(i)]
                        : data[static_cast<std::size_t>(rng.uniform01() * static_cast<double>(data.size())) % data.size()];
    term.points.col(i) << r.t, r.x, r.y;
    term.values.col(i) << r.u, r.v;
  }
  return term;
}

double RunTrace::min_L_f() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& l : losses)
    if (l.L_f < m) m = l.L_f;
  return m;
}

const network::ParameterVector* RunTrace::checkpoint(std::int64_t epoch) const {
  for (const auto& [e, p] : checkpoints)
    if (e == epoch) return &p;
  return nullptr;
}

RunTrace train(const TrainConfig& config, const TrainOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Problem problem = make_problem(config);
  LossModel model = problem.loss_model();
  const TermSampler sampler(config, problem);

  RunTrace trace;
  trace.spec = problem.spec;
  trace.seed = config.seed;
  network::ParameterVector params = network::init_params(problem.spec);

  Rng sample_rng = Rng::stream(config.seed, kSampleStream);
  Rng data_rng = Rng::stream(config.seed, kDataStream);
  LossTerm residual = sampler.residual(sample_rng);
  std::vector<LossTerm> constraints = sampler.constraints(sample_rng);
  const bool data_guided = config.schedule == Schedule::data_guided;
  const LossTerm data = data_guided ? sampler.data(data_rng) : LossTerm{};
  if (data_guided && data.count() == 0) throw ConfigError("data-guided schedule produced no labeled samples");
  const auto switch_epoch = config.effective_switch_epoch();

  const auto ckpt_epochs = config.checkpoint_epochs();
  auto ckpt_it = ckpt_epochs.begin();
  auto maybe_checkpoint = [&](std::int64_t epoch) {
    if (ckpt_it != ckpt_epochs.end() && *ckpt_it == epoch) {
      trace.checkpoints.emplace_back(epoch, params);
      ++ckpt_it;
    }
  };
  maybe_checkpoint(0);

  AdamState adam;
  std::vector<double> grad;
  std::vector<LossTerm> active;
  trace.losses.reserve(static_cast<std::size_t>(config.epochs));
  for (std::int64_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.sampling == Sampling::resample && epoch > 0) {
      residual = sampler.residual(sample_rng);
      constraints = sampler.constraints(sample_rng);
    }
    active.clear();
    active.push_back(residual);
    active.insert(active.end(), constraints.begin(), constraints.end());
    if (data_guided && epoch < switch_epoch) active.push_back(data);

    LossBreakdown loss;
    try {
      loss = composite_loss(model, params.values(), active, config.lambda, &grad);
    } catch (const NumericalError& e) {
      trace.diverged = true;
      trace.diverged_epoch = epoch;
      trace.divergence_message = e.what();
      break;
    }
    trace.losses.push_back(loss);
    if (!std::isfinite(loss.L) || loss.L > options.divergence_threshold) {
      trace.diverged = true;
      trace.diverged_epoch = epoch;
      trace.divergence_message = "loss " + io::format_double(loss.L) + " exceeds the divergence threshold";
      break;
    }
    if (options.progress && options.report_every > 0 && epoch % options.report_every == 0) options.progress(epoch, loss);

    const double lr = config.lr_decay ? decayed_learning_rate(config.lr, config.lr_decay->rate, config.lr_decay->step, epoch)
                                      : config.lr;
    network::ParameterVector before = params;
    adam_step(params.values(), grad, adam, lr);
    bool finite = true;
    for (double v : params.values()) finite = finite && std::isfinite(v);
    if (!finite) {
      params = std::move(before);
      trace.diverged = true;
      trace.diverged_epoch = epoch;
      trace.divergence_message = "non-finite parameter update";
      break;
    }
    maybe_checkpoint(epoch + 1);
  }
  trace.final_params = params;
  trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

std::string losses_csv(const RunTrace& trace) {
  std::string out = "epoch,L_f,L_u,L\n";
  for (std::size_t i = 0; i < trace.losses.size(); ++i) {
    const auto& l = trace.losses[i];
    out += io::csv_row({std::to_string(i), io::format_double(l.L_f), io::format_double(l.L_u), io::format_double(l.L)});
  }
  return out;
}

void write_run_trace(const std::filesystem::path& dir, const TrainConfig& config, const RunTrace& trace, bool force) {
  std::filesystem::create_directories(dir / "checkpoints");
  io::write_file_guarded(dir / "losses.csv", losses_csv(trace), force);
  io::write_file_guarded(dir / "config.json", config.to_json().dump(2) + "\n", force);
  json ckpts = json::array();
  for (const auto& [epoch, p] : trace.checkpoints) {
    network::save_checkpoint(dir / "checkpoints" / ("theta_" + std::to_string(epoch)), trace.spec, p, epoch, force);
    ckpts.push_back(epoch);
  }
  json meta = {{"seed", trace.seed},
               {"config_hash", io::hex64(config.hash())},
               {"min_L_f", trace.losses.empty() ? json(nullptr) : json(trace.min_L_f())},
               {"wall_time_s", trace.wall_seconds},
               {"epochs_completed", trace.losses.size()},
               {"diverged", trace.diverged},
               {"checkpoints", ckpts},
               {"spec", network::spec_to_json(trace.spec)}};
  if (trace.diverged_epoch) {
    meta["diverged_epoch"] = *trace.diverged_epoch;
    meta["divergence_message"] = trace.divergence_message;
  }
  // Wall time differs between identical runs, so metadata is always refreshed.
  io::write_file_guarded(dir / "metadata.json", meta.dump(2) + "\n", true);
}

}  // namespace pinnfp::training
