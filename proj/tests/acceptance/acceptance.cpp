// Acceptance checks: one PASS/FAIL line per criterion.
//
//   pinnfp_acceptance                      property criteria (minutes)
//   pinnfp_acceptance --reproduction       hour-scale training criteria as well
//   pinnfp_acceptance autodiff oracles     selected criteria
//
// Exit status: 0 all passed, 1 some failed, 77 only criteria named in --known-red failed.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pinnfp/autodiff/network_jets.hpp"
#include "pinnfp/error.hpp"
#include "pinnfp/evaluation/evaluation.hpp"
#include "pinnfp/evaluation/sweep.hpp"
#include "pinnfp/landscape/landscape.hpp"
#include "pinnfp/oracles/oracles.hpp"
#include "pinnfp/random.hpp"
#include "pinnfp/systems/systems.hpp"
#include "pinnfp/training/train.hpp"

using namespace pinnfp;
using autodiff::Partial;
using network::Activation;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

struct Settings {
  unsigned threads = 1;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// |a - b| relative to |b|, with 1e-3 as the smallest reference magnitude.
double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-3); }

training::TrainConfig random_config(const std::string& system, Activation act, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> depth(1, 3), width(3, 16);
  training::TrainConfig c;
  c.system = system;
  c.network.activation = act;
  c.network.hidden_layers.resize(static_cast<std::size_t>(depth(gen)));
  for (int& w : c.network.hidden_layers) w = width(gen);
  c.seed = gen();
  return c;
}

// Initialized weights times a random gain, so tanh/sin layers see saturated and linear regimes.
std::vector<double> random_theta(const network::NetworkSpec& spec, std::mt19937_64& gen) {
  const auto p = network::init_params(spec);
  std::vector<double> theta(p.values().begin(), p.values().end());
  std::uniform_real_distribution<double> gain(0.5, 2.5), bias(-0.5, 0.5);
  const double g = gain(gen);
  for (double& v : theta) v = v * g + 0.1 * bias(gen);
  return theta;
}

double central(const std::function<double(double)>& f, double x, double h) { return (f(x + h) - f(x - h)) / (2 * h); }

// ---------------------------------------------------------------------------------------------

Result autodiff_correctness(const Settings&) {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> t_dist(0.0, 2.0), x_dist(-1.0, 1.0);
  double worst_in = 0.0, worst_grad = 0.0;
  int triples = 0;
  for (Activation act : {Activation::tanh, Activation::swish, Activation::sin}) {
    for (int k = 0; k < 100; ++k, ++triples) {
      // Alternate 1-input (pendulum) and 2-input (Allen-Cahn) networks.
      const bool two = (k % 2) == 1;
      const auto cfg = random_config(two ? "allen-cahn" : "pendulum", act, gen);
      const auto problem = training::make_problem(cfg);
      const auto theta = random_theta(problem.spec, gen);
      std::vector<double> pt{t_dist(gen)};
      if (two) pt.push_back(x_dist(gen));

      auto eval = [&](std::vector<double> p, const Partial& d) {
        const std::vector<Partial> req{d};
        return autodiff::evaluate_with_input_derivatives(problem.spec, theta, p, req).at(0, d);
      };
      auto along = [&](int axis, const Partial& lower, const Partial& upper) {
        const double got = eval(pt, upper);
        const double fd = central(
            [&](double v) {
              auto p = pt;
              p[static_cast<std::size_t>(axis)] = v;
              return eval(p, lower);
            },
            pt[static_cast<std::size_t>(axis)], 1e-5);
        worst_in = std::max(worst_in, rel_err(got, fd));
      };
      along(0, Partial{}, Partial::along({0}));
      along(0, Partial::along({0}), Partial::along({0, 0}));
      if (two) {
        along(1, Partial{}, Partial::along({1}));
        along(1, Partial::along({1}), Partial::along({1, 1}));
      }

      // Residual loss at the point: gradient against central differences on 5 coordinates.
      training::LossModel model = problem.loss_model();
      Eigen::MatrixXd pts(static_cast<Eigen::Index>(pt.size()), 1);
      for (std::size_t r = 0; r < pt.size(); ++r) pts(static_cast<Eigen::Index>(r), 0) = pt[r];
      std::vector<double> grad(theta.size(), 0.0);
      training::physics_loss(model, theta, pts, grad);
      std::uniform_int_distribution<std::size_t> idx(0, theta.size() - 1);
      for (int j = 0; j < 5; ++j) {
        const std::size_t i = idx(gen);
        auto th = theta;
        const double fd = central(
            [&](double v) {
              th[i] = v;
              return training::physics_loss(model, th, pts);
            },
            theta[i], 1e-6 * std::max(1.0, std::abs(theta[i])));
        worst_grad = std::max(worst_grad, rel_err(grad[i], fd));
      }
    }
  }
  const bool pass = worst_in <= 1e-5 && worst_grad <= 1e-5;
  return {pass, fmt("%d triples; max rel err input derivatives %.2e, loss gradient %.2e (limit 1e-05)", triples,
                    worst_in, worst_grad)};
}

Result hard_ic_exactness(const Settings&) {
  std::mt19937_64 gen(202);
  std::uniform_real_distribution<double> y0_dist(-3.0, 3.0);
  const std::vector<Activation> acts{Activation::tanh, Activation::swish, Activation::sin};
  double worst = 0.0;
  const Eigen::MatrixXd origin = Eigen::MatrixXd::Zero(1, 1);
  for (int k = 0; k < 1000; ++k) {
    const bool toy = k % 2 == 0;
    auto cfg = random_config(toy ? "toy" : "pendulum", acts[static_cast<std::size_t>(k) % 3], gen);
    const double y0 = y0_dist(gen);
    cfg.params = toy ? nlohmann::json{{"y0", y0}} : nlohmann::json{{"y0_deg", systems::radians_to_degrees(y0)}};
    cfg.hard_ic = true;
    const auto problem = training::make_problem(cfg);
    const double want = problem.system->descriptor().parameter("y0");
    auto theta = random_theta(problem.spec, gen);
    for (double& v : theta) v *= 1e3;  // large outputs must not leak into y(0)
    training::LossModel model = problem.loss_model();
    const std::vector<Partial> value{Partial{}};
    const double got = model.fields(theta, origin, value)[0].value();
    worst = std::max(worst, std::abs(got - want));
  }
  return {worst <= 1e-15, fmt("1000 random networks; max |y(0) - y0| = %.2e (limit 1e-15)", worst)};
}

Result continuity(const Settings&) {
  std::mt19937_64 gen(303);
  std::uniform_real_distribution<double> t(0.0, 20.0), x(1.0, 8.0), y(-2.0, 2.0);
  const std::vector<Activation> acts{Activation::tanh, Activation::swish, Activation::sin};
  double worst = 0.0;
  const std::vector<Partial> req{Partial::along({1}), Partial::along({2})};
  for (int k = 0; k < 1000; ++k) {
    const auto cfg = random_config("navier-stokes", acts[static_cast<std::size_t>(k) % 3], gen);
    const auto problem = training::make_problem(cfg);
    const auto theta = random_theta(problem.spec, gen);
    Eigen::MatrixXd pt(3, 1);
    pt << t(gen), x(gen), y(gen);
    training::LossModel model = problem.loss_model();
    const auto f = model.fields(theta, pt, req)[0];
    worst = std::max(worst, std::abs(f.at(0, req[0]) + f.at(1, req[1])));
  }
  return {worst <= 1e-12, fmt("1000 random (network, point) pairs; max |u_x + v_y| = %.2e (limit 1e-12)", worst)};
}

Result fixed_point_loss(const Settings&) {
  std::mt19937_64 gen(404);
  double worst_loss = 0.0, worst_pi = 0.0, worst_grad = 0.0;
  int cases = 0;
  for (const char* name : {"pendulum", "toy", "allen-cahn", "navier-stokes"}) {
    const auto sys = systems::make_system(name);
    for (const auto& fp : sys->descriptor().fixed_points) {
      if (!fp.constant) continue;
      for (Activation act : {Activation::tanh, Activation::swish, Activation::sin}) {
        auto cfg = random_config(name, act, gen);
        const bool uniform_flow = cfg.system == "navier-stokes" && fp.constant_value[0] != 0.0;
        // Uniform flow has psi = U y: an affine stream function, not a constant network.
        if (uniform_flow) cfg.network.hidden_layers.clear();
        const auto problem = training::make_problem(cfg);
        const auto& desc = problem.system->descriptor();
        std::vector<double> theta;
        if (uniform_flow) {
          network::ParameterVector p(problem.spec);
          const auto& out = p.layout().layer(0);
          // Column-major (outputs x inputs): channel 0 (psi), input 2 (y).
          p[out.weight_offset + 2 * static_cast<std::size_t>(out.fan_out)] = fp.constant_value[0];
          theta.assign(p.values().begin(), p.values().end());
        } else {
          std::vector<double> out(static_cast<std::size_t>(problem.spec.output_width), 0.0);
          if (cfg.system == "navier-stokes")
            out[1] = fp.constant_value[2];
          else
            out[0] = fp.constant_value[0];
          const auto p = network::constant_network(problem.spec, out);
          theta.assign(p.values().begin(), p.values().end());
        }
        training::LossModel model = problem.loss_model();
        for (int set = 0; set < 3; ++set, ++cases) {
          Rng rng(gen());
          const auto pts = training::sample_collocation(desc.horizon, desc.spatial_bounds, 256, rng);
          std::vector<double> grad(theta.size(), 0.0);
          const double L = training::physics_loss(model, theta, pts, grad);
          double g = 0.0;
          for (double v : grad) g += v * v;
          worst_grad = std::max(worst_grad, std::sqrt(g));
          // fl(pi) is not a root of sin: the unstable pendulum top carries round-off.
          if (fp.label == "y=pi")
            worst_pi = std::max(worst_pi, L);
          else
            worst_loss = std::max(worst_loss, L);
        }
      }
    }
  }
  const bool pass = worst_loss == 0.0 && worst_pi <= 1e-24 && worst_grad <= 1e-12;
  return {pass, fmt("%d (fixed point, network, collocation set) cases; max L_f = %.1e, at y=pi %.1e (limit 1e-24); "
                    "max |grad| = %.1e (limit 1e-12)",
                    cases, worst_loss, worst_pi, worst_grad)};
}

Result piecewise_steady_state(const Settings&) {
  const auto sys = systems::make_system("allen-cahn");
  const auto& desc = sys->descriptor();
  const auto it = std::find_if(desc.fixed_points.begin(), desc.fixed_points.end(),
                               [](const systems::FixedPoint& f) { return !f.constant; });
  if (it == desc.fixed_points.end()) return {false, "no piecewise steady state registered"};
  Rng rng(505);
  std::vector<double> r(static_cast<std::size_t>(sys->arity()));
  double worst = 0.0;
  int redrawn = 0;
  for (int k = 0; k < 1'000'000; ++k) {
    const double t = rng.uniform(0.0, desc.horizon);
    double x = rng.uniform(-1.0, 1.0);
    while (std::abs(x) == 0.5) {
      std::fprintf(stderr, "redrawing collocation point on a jump (x = %g)\n", x);
      ++redrawn;
      x = rng.uniform(-1.0, 1.0);
    }
    const double coords[2] = {t, x};
    sys->residuals(systems::fixed_point_bundle(desc, *it, coords), r);
    for (double v : r) worst = std::max(worst, std::abs(v));
  }
  return {worst == 0.0, fmt("1e6 uniform points (%d redrawn on a jump); max |residual| = %.1e (required 0)", redrawn,
                            worst)};
}

Result oracles_check(const Settings&) {
  std::ostringstream detail;
  bool pass = true;

  // Closed form against the ODE by central differences.
  std::mt19937_64 gen(606);
  std::uniform_real_distribution<double> y0_dist(-1.0, 1.0), t_dist(0.0, 10.0);
  double worst_toy = 0.0;
  for (int k = 0; k < 1000; ++k) {
    double y0 = 0.0;
    while (y0 == 0.0) y0 = y0_dist(gen);
    const double t = t_dist(gen) + 1e-4;
    const double y = oracles::toy_analytic(y0, t);
    const double fd = central([&](double s) { return oracles::toy_analytic(y0, s); }, t, 1e-5);
    worst_toy = std::max(worst_toy, std::abs(fd - y * (1 - y * y)));
  }
  pass &= worst_toy <= 1e-8;
  detail << fmt("toy closed form %.1e (<= 1e-08)", worst_toy);

  // RK4 energy drift.
  double worst_drift = 0.0;
  for (double deg : {25.0, 100.0, 175.0}) {
    const auto ref = oracles::pendulum_reference(systems::degrees_to_radians(deg), 0.0, 7.5, 1e-3);
    const double e0 = oracles::pendulum_energy(ref.at(0, 0), ref.at(0, 1));
    for (std::size_t i = 0; i < ref.time_count(); ++i)
      worst_drift = std::max(worst_drift, std::abs(oracles::pendulum_energy(ref.at(i, 0), ref.at(i, 1)) - e0) /
                                              std::abs(e0));
  }
  pass &= worst_drift <= 1e-8;
  detail << fmt("; RK4 energy drift %.1e (<= 1e-08)", worst_drift);

  // Small-angle period from successive downward zero crossings of y.
  const auto ref = oracles::pendulum_reference(systems::degrees_to_radians(0.5), 0.0, 10.0, 1e-3);
  std::vector<double> crossings;
  for (std::size_t i = 1; i < ref.time_count(); ++i) {
    const double a = ref.at(i - 1, 0), b = ref.at(i, 0);
    if (a > 0.0 && b <= 0.0) crossings.push_back(ref.times[i - 1] + (ref.times[i] - ref.times[i - 1]) * a / (a - b));
  }
  const double period =
      crossings.size() >= 2 ? (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1) : 0.0;
  pass &= std::abs(period - 2.0061) <= 1e-3;
  detail << fmt("; small-angle period %.5f s (2.0061 +- 1e-03)", period);

  const auto coarse = oracles::allen_cahn_reference(256, 1e-4, 1.0);
  const auto fine = oracles::allen_cahn_reference(512, 1e-4, 1.0);
  const double sc = oracles::self_convergence_error(coarse, fine);
  pass &= sc <= 1e-4;
  detail << fmt("; Allen-Cahn self-convergence nx 256 vs 512 %.2e (<= 1e-04)", sc);
  return {pass, detail.str()};
}

Result threshold_nesting(const Settings& s) {
  // A fixed set of short pendulum and toy runs with a spread of errors.
  int runs = 0, nested = 0, consistent = 0;
  std::array<int, 3> counts{};
  const std::array<double, 3> thresholds{0.05, 0.15, 0.25};
  for (const char* system : {"pendulum", "toy"}) {
    evaluation::SweepGrid grid;
    grid.base.system = system;
    grid.base.network.hidden_layers = {16, 16};
    grid.base.epochs = 1500;
    grid.base.lr = 5e-3;
    grid.base.n_f = 32;
    grid.T = {1.0, 2.5};
    grid.y0 = std::string(system) == "toy" ? std::vector<double>{0.01, 0.5} : std::vector<double>{25.0, 120.0};
    grid.y0_in_degrees = std::string(system) == "pendulum";
    grid.seeds = 3;
    std::vector<training::RunTrace> traces;
    const auto rows = evaluation::run_sweep(grid, {.threads = s.threads, .progress = {}}, &traces);
    for (std::size_t r = 0; r < rows.size(); ++r, ++runs) {
      std::array<bool, 3> ok{};
      bool same = true;
      for (std::size_t k = 0; k < 3; ++k) {
        const auto o = evaluation::reclassify(rows[r].outcome, thresholds[k]);
        ok[k] = o.cls == evaluation::OutcomeClass::success;
        counts[k] += ok[k];
        const auto direct = evaluation::evaluate_run(grid.config_for(rows[r].cell, static_cast<int>(rows[r].seed - grid.base.seed)),
                                                     traces[r], thresholds[k]);
        same &= direct.cls == o.cls;
      }
      nested += (!ok[0] || ok[1]) && (!ok[1] || ok[2]);
      consistent += same;
    }
  }
  return {nested == runs && consistent == runs,
          fmt("%d recorded runs; successes at 5/15/25%%: %d/%d/%d; nested in %d, rescoring consistent in %d", runs,
              counts[0], counts[1], counts[2], nested, consistent)};
}

// ------------------------------------------------------------------- reproduction (hours)

training::TrainConfig reference_net(const std::string& system) {
  training::TrainConfig c;
  c.system = system;
  c.network.hidden_layers = {50, 50, 50, 50};
  c.network.activation = Activation::tanh;
  c.lr = 1e-3;
  c.epochs = 50000;
  c.n_f = 64;
  return c;
}

void progress_line(const char* what, std::size_t done, std::size_t total) {
  std::fprintf(stderr, "  %s: %zu/%zu runs\n", what, done, total);
}

double success_pct(const std::vector<evaluation::CellSummary>& cells, double T, double y0) {
  for (const auto& c : cells)
    if (c.cell.T == T && c.cell.y0 == y0) return c.success_pct;
  throw ConfigError("cell not found");
}

Result toy_success_trend(const Settings& s) {
  evaluation::SweepGrid grid;
  grid.base = reference_net("toy");
  grid.base.hard_ic = true;
  grid.T = {2.5, 7.5};
  grid.y0 = {0.001, 0.01, 0.1};
  grid.seeds = 10;
  const auto rows = evaluation::run_sweep(
      grid, {.threads = s.threads, .progress = [](std::size_t d, std::size_t n) { progress_line("toy", d, n); }});
  const auto cells = evaluation::summarize(rows);
  bool pass = true;
  std::ostringstream detail;
  detail << "success % at T=2.5:";
  for (double y0 : grid.y0) {
    const double p = success_pct(cells, 2.5, y0);
    pass &= p >= 80.0;
    detail << fmt(" %g", p);
  }
  const double late = success_pct(cells, 7.5, 0.001);
  pass &= late <= 20.0;
  detail << fmt(" (>= 80 each); T=7.5, y0=0.001: %g (<= 20)", late);
  return {pass, detail.str()};
}

Result pendulum_success_trend(const Settings& s) {
  evaluation::SweepGrid grid;
  grid.base = reference_net("pendulum");
  grid.base.schedule = training::Schedule::vanilla;
  grid.base.lambda = 1.0;
  grid.seeds = 10;
  grid.y0_in_degrees = true;
  auto run_cell = [&](double T, double y0) {
    grid.T = {T};
    grid.y0 = {y0};
    const auto rows = evaluation::run_sweep(grid, {.threads = s.threads, .progress = [](std::size_t d, std::size_t n) {
                                                     progress_line("pendulum", d, n);
                                                   }});
    return evaluation::summarize(rows).at(0);
  };
  const auto a = run_cell(2.5, 100.0);
  const auto b = run_cell(7.5, 25.0);
  const bool majority_stable = b.stable_pct > 50.0;
  const bool pass = a.success_pct >= 80.0 && b.success_pct <= 10.0 && majority_stable;
  return {pass, fmt("T=2.5, y0=100deg: success %g%% (>= 80); T=7.5, y0=25deg: success %g%% (<= 10), "
                    "stable-fp %g%%, unstable-fp %g%% (stable-fp majority required)",
                    a.success_pct, b.success_pct, b.stable_pct, b.unstable_pct)};
}

Result economical_minima(const Settings& s) {
  evaluation::MinimaStudy study;
  study.base = reference_net("toy");
  study.base.params = {{"T", 10.0}};
  study.base.hard_ic = true;
  study.base.switch_epoch = 25000;
  study.base.n_data = 10;
  study.y0 = {0.001, 0.01, 0.1};
  study.seeds = 5;
  const auto rows = evaluation::economical_minima_report(
      study, {.threads = s.threads, .progress = [](std::size_t d, std::size_t n) { progress_line("minima", d, n); }});
  using training::Schedule;
  std::vector<double> phys;
  for (double y0 : study.y0) phys.push_back(evaluation::median_min_L_f(rows, Schedule::physics_driven, y0));
  const double data = evaluation::median_min_L_f(rows, Schedule::data_guided, 0.001);
  const bool monotone = phys[0] <= phys[1] && phys[1] <= phys[2];
  const bool below = phys[0] < data;
  return {monotone && below,
          fmt("physics-driven median min L_f over y0 = 0.001/0.01/0.1: %.3e / %.3e / %.3e (non-decreasing); "
              "data-guided at y0=0.001: %.3e (physics-driven must be lower)",
              phys[0], phys[1], phys[2], data)};
}

Result landscape_structure(const Settings& s) {
  auto cfg = reference_net("toy");
  cfg.params = {{"y0", 0.5}, {"T", 8.0}};
  cfg.hard_ic = true;
  cfg.checkpoints = {0, 25000, 50000};
  const std::vector<double> horizons{8.0, 6.0, 4.0, 2.5};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const auto trace = training::train(cfg);
    if (trace.diverged) continue;
    // Late escape: stuck (not a success) at the middle checkpoint, a success at the end.
    auto mid_trace = trace;
    mid_trace.final_params = *trace.checkpoint(25000);
    const auto at_mid = evaluation::evaluate_run(cfg, mid_trace);
    const auto at_end = evaluation::evaluate_run(cfg, trace);
    std::fprintf(stderr, "  seed %llu: L2 at 25k %.3f, at 50k %.3f\n", static_cast<unsigned long long>(seed),
                 at_mid.l2, at_end.l2);
    if (at_mid.cls == evaluation::OutcomeClass::success || at_end.cls != evaluation::OutcomeClass::success) continue;

    const auto problem = training::make_problem(cfg);
    const auto& t0 = trace.checkpoint(0)->values();
    const auto& tm = trace.checkpoint(25000)->values();
    const auto& tf = trace.checkpoint(50000)->values();
    const auto dirs = landscape::build_directions(t0, tm, tf);
    const std::vector<landscape::Coordinates> marks{
        {0, 0}, landscape::project(tm, t0, dirs), landscape::project(tf, t0, dirs)};
    landscape::GridSettings gs;
    gs.extents = landscape::default_extents(marks, 41, 41, 0.25, marks[1]);
    gs.threads = s.threads;
    bool final_min_everywhere = true;
    std::map<double, landscape::LocalMinKind> mid_kind;
    for (double T : horizons) {
      gs.T = T;
      const auto grid = landscape::evaluate_grid(problem, t0, dirs, gs);
      const auto [im, jm] = grid.nearest(marks[1]);
      const auto [jf_i, jf_j] = grid.nearest(marks[2]);
      mid_kind[T] = landscape::local_min_test(grid, im, jm);
      const double lo = *std::min_element(grid.raw.begin(), grid.raw.end());
      final_min_everywhere &= grid.raw_at(jf_i, jf_j) == lo;
    }
    using K = landscape::LocalMinKind;
    const bool pass = mid_kind[8.0] == K::strict_local_min && mid_kind[2.5] != K::strict_local_min &&
                      final_min_everywhere;
    return {pass, fmt("seed %llu escapes (L2 %.3f -> %.3f); theta_mid at T=8: %s, at T=2.5: %s; "
                      "theta_final is the grid minimum at every T: %s",
                      static_cast<unsigned long long>(seed), at_mid.l2, at_end.l2,
                      std::string(landscape::to_string(mid_kind[8.0])).c_str(),
                      std::string(landscape::to_string(mid_kind[2.5])).c_str(), final_min_everywhere ? "yes" : "no")};
  }
  return {false, "no run among 20 seeds showed a late escape (stuck at 25k epochs, success at 50k)"};
}

Result allen_cahn_long_run(const Settings&) {
  training::TrainConfig cfg = training::TrainConfig::from_json(
      {{"system", "allen-cahn"}, {"network", {{"arch", "6x100"}}}, {"lambda", 100}, {"epochs", 200000}});
  cfg.checkpoints = {50000, 200000};
  training::TrainOptions opt;
  opt.report_every = 5000;
  opt.progress = [](std::int64_t e, const training::LossBreakdown& l) {
    std::fprintf(stderr, "  epoch %lld: L %.4e\n", static_cast<long long>(e), l.L);
  };
  const auto trace = training::train(cfg, opt);
  if (trace.diverged) return {false, "training diverged: " + trace.divergence_message};
  const auto problem = training::make_problem(cfg);
  const auto ref = oracles::allen_cahn_reference(512, 1e-4, 1.0);
  auto error = [&](std::span<const double> theta, double t_lo, double t_hi) {
    std::vector<double> pred, want;
    Eigen::MatrixXd pts(2, 1);
    training::LossModel model = problem.loss_model();
    const std::vector<Partial> value{Partial{}};
    for (std::size_t ti = 0; ti < ref.time_count(); ++ti) {
      if (ref.times[ti] < t_lo || ref.times[ti] > t_hi) continue;
      for (std::size_t xi = 0; xi < ref.space.size(); ++xi) {
        pts << ref.times[ti], ref.space[xi];
        pred.push_back(model.fields(theta, pts, value)[0].value());
        want.push_back(ref.at(ti, xi, 0));
      }
    }
    return evaluation::l2_relative_error(pred, want);
  };
  const auto& mid = trace.checkpoint(50000)->values();
  const double late = error(mid, 0.5 + 1e-12, 1.0), first = error(mid, 0.0, 0.0);
  const double full = error(trace.final_params.values(), 0.0, 1.0);
  const bool pass = late > 0.5 && first < 0.05 && full < 0.15;
  return {pass, fmt("50k epochs: L2 on t>0.5 %.3f (> 0.5), at t=0 %.3f (< 0.05); 200k epochs: full L2 %.3f (< 0.15)",
                    late, first, full)};
}

struct Criterion {
  const char* id;
  const char* title;
  bool reproduction;
  bool extended;
  Result (*run)(const Settings&);
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"autodiff", "input derivatives and loss gradients match finite differences", false, false,
       autodiff_correctness},
      {"hard-ic", "hard initial condition is exact", false, false, hard_ic_exactness},
      {"continuity", "stream-function head is divergence free", false, false, continuity},
      {"fixed-point-loss", "constant networks at fixed points have zero loss and gradient", false, false,
       fixed_point_loss},
      {"piecewise-steady-state", "piecewise Allen-Cahn steady state has zero residual", false, false,
       piecewise_steady_state},
      {"oracles", "reference solvers", false, false, oracles_check},
      {"threshold-nesting", "success sets nest across thresholds", false, false, threshold_nesting},
      {"toy-success-trend", "toy success collapses with horizon at small y0", true, false, toy_success_trend},
      {"pendulum-success-trend", "pendulum long horizon lands on the stable fixed point", true, false,
       pendulum_success_trend},
      {"economical-minima", "physics-driven training finds lower physics loss", true, false, economical_minima},
      {"landscape-structure", "intermediate checkpoint is a local minimum only at the long horizon", true, false,
       landscape_structure},
      {"allen-cahn-long-run", "Allen-Cahn trapped then escapes", true, true, allen_cahn_long_run},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pinnfp acceptance checks"};
  std::vector<std::string> selected, known_red;
  bool reproduction = false, extended = false, list = false;
  Settings settings;
  app.add_option("criteria", selected, "criterion ids (default: all property criteria)");
  app.add_flag("--reproduction", reproduction, "include the hour-scale training criteria");
  app.add_flag("--extended", extended, "include the overnight criteria");
  app.add_option("--known-red", known_red, "criteria whose failure does not change the exit status");
  app.add_option("-j,--threads", settings.threads, "worker threads for training sweeps");
  app.add_flag("--list", list, "list criteria and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : criteria())
      std::printf("%-24s %s%s\n", c.id, c.title, c.extended ? " [extended]" : c.reproduction ? " [reproduction]" : "");
    return 0;
  }
  for (const auto& id : selected)
    if (std::none_of(criteria().begin(), criteria().end(), [&](const Criterion& c) { return id == c.id; })) {
      std::fprintf(stderr, "unknown criterion '%s' (see --list)\n", id.c_str());
      return 2;
    }

  int failures = 0, tolerated_failures = 0;
  for (const auto& c : criteria()) {
    const bool wanted = selected.empty() ? (!c.reproduction || reproduction) && (!c.extended || extended)
                                         : std::find(selected.begin(), selected.end(), c.id) != selected.end();
    if (!wanted) continue;
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run(settings);
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool tolerated = !r.pass && std::find(known_red.begin(), known_red.end(), c.id) != known_red.end();
    std::printf("%s %-24s %s: %s [%.1fs]%s\n", r.pass ? "PASS" : "FAIL", c.id, c.title, r.detail.c_str(), secs,
                tolerated ? " (known)" : "");
    std::fflush(stdout);
    if (!r.pass) ++(tolerated ? tolerated_failures : failures);
  }
  if (failures > 0) return 1;
  return tolerated_failures > 0 ? 77 : 0;
}
