#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "pinnfp/autodiff/network_jets.hpp"
#include "pinnfp/error.hpp"
#include "pinnfp/evaluation/evaluation.hpp"
#include "pinnfp/landscape/landscape.hpp"
#include "pinnfp/oracles/oracles.hpp"
#include "pinnfp/training/train.hpp"

namespace py = pybind11;
using namespace pinnfp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

training::TrainConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return training::TrainConfig::from_json(j);
}

std::span<const double> as_span(const Array& a) {
  return {a.data(), static_cast<std::size_t>(a.size())};
}

Array to_array(std::span<const double> v) {
  Array out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Array to_array(std::span<const double> v, py::ssize_t rows, py::ssize_t cols) {
  Array out({rows, cols});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

// Points arrive as (N, input_width); the library wants input_width x N.
Eigen::MatrixXd to_points(const Array& pts, int width) {
  if (pts.ndim() == 1 && width == 1) {
    Eigen::MatrixXd m(1, pts.shape(0));
    for (py::ssize_t i = 0; i < pts.shape(0); ++i) m(0, i) = pts.data()[i];
    return m;
  }
  if (pts.ndim() != 2 || pts.shape(1) != width)
    throw ConfigError("points must have shape (N, " + std::to_string(width) + ")");
  Eigen::MatrixXd m(width, pts.shape(0));
  auto r = pts.unchecked<2>();
  for (py::ssize_t i = 0; i < pts.shape(0); ++i)
    for (int c = 0; c < width; ++c) m(c, i) = r(i, c);
  return m;
}

py::dict trace_dict(const training::RunTrace& trace) {
  std::vector<double> losses;
  losses.reserve(trace.losses.size() * 3);
  for (const auto& l : trace.losses) {
    losses.push_back(l.L_f);
    losses.push_back(l.L_u);
    losses.push_back(l.L);
  }
  py::dict checkpoints;
  for (const auto& [epoch, p] : trace.checkpoints) checkpoints[py::int_(epoch)] = to_array(p.values());
  py::dict d;
  d["losses"] = to_array(losses, static_cast<py::ssize_t>(trace.losses.size()), 3);
  d["final_params"] = to_array(trace.final_params.values());
  d["checkpoints"] = checkpoints;
  d["diverged"] = trace.diverged;
  d["diverged_epoch"] = trace.diverged_epoch ? py::object(py::int_(*trace.diverged_epoch)) : py::object(py::none());
  d["min_L_f"] = trace.min_L_f();
  d["seed"] = trace.seed;
  d["wall_seconds"] = trace.wall_seconds;
  return d;
}

py::dict outcome_dict(const evaluation::Outcome& o) {
  py::dict d;
  d["l2"] = o.l2;
  d["class"] = std::string(evaluation::to_string(o.cls));
  d["min_L_f"] = o.min_L_f;
  d["borderline"] = o.borderline;
  d["diverged"] = o.diverged;
  auto opt = [](const std::optional<double>& v) { return v ? py::object(py::float_(*v)) : py::object(py::none()); };
  d["y_T"] = opt(o.y_T);
  d["ydot_T"] = opt(o.ydot_T);
  d["energy_T"] = opt(o.energy_T);
  d["energy_0"] = opt(o.energy_0);
  return d;
}

py::dict reference_dict(const oracles::ReferenceSolution& ref) {
  py::dict d;
  d["t"] = to_array(ref.times);
  if (!ref.space.empty()) {
    d["x"] = to_array(ref.space);
    d["u"] = to_array(ref.values, static_cast<py::ssize_t>(ref.time_count()), static_cast<py::ssize_t>(ref.space.size()));
    return d;
  }
  const std::size_t nc = ref.components.size();
  for (std::size_t c = 0; c < nc; ++c) {
    std::vector<double> col(ref.time_count());
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = ref.at(i, c);
    d[py::str(ref.components[c])] = to_array(col);
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Physics-informed network training and loss-landscape tools for dynamical systems.";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CapabilityError>(m, "CapabilityError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<UndefinedError>(m, "UndefinedError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<DegenerateDirectionError>(m, "DegenerateDirectionError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  // Oracles.
  m.def("toy_analytic", py::vectorize(oracles::toy_analytic), py::arg("y0"), py::arg("t"));
  m.def(
      "pendulum_energy", [](double y, double ydot) { return oracles::pendulum_energy(y, ydot); }, py::arg("y"),
      py::arg("ydot"));
  m.def(
      "pendulum_reference",
      [](double y0, double ydot0, double T, double dt) {
        return reference_dict(oracles::pendulum_reference(y0, ydot0, T, dt));
      },
      py::arg("y0"), py::arg("ydot0"), py::arg("T"), py::arg("dt") = 1e-3);
  m.def(
      "allen_cahn_reference",
      [](int nx, double dt, double T, double snapshot_dt, const std::string& laplacian) {
        oracles::AllenCahnOptions opt;
        opt.nx = nx;
        opt.dt = dt;
        opt.T = T;
        opt.snapshot_dt = snapshot_dt;
        opt.laplacian = oracles::parse_laplacian(laplacian);
        oracles::ReferenceSolution ref;
        {
          py::gil_scoped_release release;
          ref = oracles::allen_cahn_reference(opt);
        }
        return reference_dict(ref);
      },
      py::arg("nx") = 512, py::arg("dt") = 1e-4, py::arg("T") = 1.0, py::arg("snapshot_dt") = 0.005,
      py::arg("laplacian") = "spectral");

  // Networks and losses; configs are passed as JSON text (the Python wrapper serialises dicts).
  m.def(
      "init_params",
      [](const std::string& config) {
        const auto problem = training::make_problem(parse_config(config));
        return to_array(network::init_params(problem.spec).values());
      },
      py::arg("config"));
  m.def(
      "input_derivatives",
      [](const std::string& config, const Array& params, const Array& point,
         const std::vector<std::vector<int>>& request) {
        const auto problem = training::make_problem(parse_config(config));
        std::vector<autodiff::Partial> partials;
        for (const auto& axes : request) partials.push_back(autodiff::Partial::along(std::span<const int>(axes)));
        const auto bundle =
            autodiff::evaluate_with_input_derivatives(problem.spec, as_span(params), as_span(point), partials);
        std::vector<double> out(partials.size() * static_cast<std::size_t>(problem.spec.output_width));
        for (std::size_t k = 0; k < partials.size(); ++k)
          for (int c = 0; c < problem.spec.output_width; ++c)
            out[k * static_cast<std::size_t>(problem.spec.output_width) + static_cast<std::size_t>(c)] =
                bundle.at(c, partials[k]);
        return to_array(out, static_cast<py::ssize_t>(partials.size()), problem.spec.output_width);
      },
      py::arg("config"), py::arg("params"), py::arg("point"), py::arg("request"),
      "Network outputs differentiated along each axis list in `request`; shape (len(request), outputs).");
  m.def(
      "physics_loss",
      [](const std::string& config, const Array& params, const Array& points) {
        const auto problem = training::make_problem(parse_config(config));
        auto model = problem.loss_model();
        const Eigen::MatrixXd pts = to_points(points, problem.spec.input_width);
        std::vector<double> grad(model.parameter_count(), 0.0);
        const double loss = training::physics_loss(model, as_span(params), pts, grad);
        return py::make_tuple(loss, to_array(grad));
      },
      py::arg("config"), py::arg("params"), py::arg("points"),
      "Mean squared residual over the points and its parameter gradient.");

  // Training and evaluation.
  m.def(
      "train",
      [](const std::string& config) {
        const auto c = parse_config(config);
        training::RunTrace trace;
        {
          py::gil_scoped_release release;
          trace = training::train(c);
        }
        return trace_dict(trace);
      },
      py::arg("config"));
  m.def(
      "evaluate",
      [](const std::string& config, const Array& params, double threshold, double min_L_f) {
        const auto c = parse_config(config);
        const auto problem = training::make_problem(c);
        training::RunTrace trace;
        trace.spec = problem.spec;
        trace.final_params = network::ParameterVector(
            network::ParameterLayout(problem.spec), std::vector<double>(params.data(), params.data() + params.size()));
        trace.losses.push_back({});
        trace.losses.back().L_f = min_L_f;
        return outcome_dict(evaluation::evaluate_run(c, trace, threshold));
      },
      py::arg("config"), py::arg("params"), py::arg("threshold") = 0.15, py::arg("min_L_f") = 0.0,
      "Scores an ODE network against the reference on 1000 equispaced times.");
  m.def(
      "l2_relative_error",
      [](const Array& pred, const Array& ref) { return evaluation::l2_relative_error(as_span(pred), as_span(ref)); },
      py::arg("prediction"), py::arg("reference"));

  // Landscape.
  m.def(
      "loss_landscape",
      [](const std::string& config, const Array& theta0, const Array& theta_mid, const Array& theta_final, double T,
         int resolution, std::size_t n_col, std::uint64_t seed, double margin, unsigned threads) {
        const auto problem = training::make_problem(parse_config(config));
        const auto dirs = landscape::build_directions(as_span(theta0), as_span(theta_mid), as_span(theta_final));
        const std::vector<landscape::Coordinates> marks{{0.0, 0.0},
                                                        landscape::project(as_span(theta_mid), as_span(theta0), dirs),
                                                        landscape::project(as_span(theta_final), as_span(theta0), dirs)};
        landscape::GridSettings s;
        s.extents = landscape::default_extents(marks, resolution, resolution, margin, marks[1]);
        s.n1 = s.n2 = resolution;
        s.T = T;
        s.n_col = n_col;
        s.seed = seed;
        s.threads = threads;
        landscape::LandscapeGrid grid;
        {
          py::gil_scoped_release release;
          grid = landscape::evaluate_grid(problem, as_span(theta0), dirs, s);
        }
        std::vector<double> s1(static_cast<std::size_t>(grid.n1)), s2(static_cast<std::size_t>(grid.n2));
        for (int i = 0; i < grid.n1; ++i) s1[static_cast<std::size_t>(i)] = grid.s1(i);
        for (int j = 0; j < grid.n2; ++j) s2[static_cast<std::size_t>(j)] = grid.s2(j);
        py::list markers;
        for (const auto& c : marks) markers.append(py::make_tuple(c.s1, c.s2));
        py::dict d;
        d["s1"] = to_array(s1);
        d["s2"] = to_array(s2);
        d["values"] = to_array(grid.values, grid.n1, grid.n2);
        d["markers"] = markers;
        return d;
      },
      py::arg("config"), py::arg("theta0"), py::arg("theta_mid"), py::arg("theta_final"), py::arg("T"),
      py::arg("resolution") = 41, py::arg("n_col") = 1024, py::arg("seed") = 0, py::arg("margin") = 0.25,
      py::arg("threads") = 1,
      "Physics loss on the plane through three checkpoints; values[i, j] sits at (s1[i], s2[j]).");
}
