#include "pinnfp/systems/systems.hpp"

#include <algorithm>

#include "pinnfp/error.hpp"

namespace pinnfp::systems {

using nlohmann::json;

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::stable:
      return "stable";
    case Stability::asymptotically_stable:
      return "asymptotically-stable";
    case Stability::unstable:
      return "unstable";
  }
  return "unstable";
}

std::string_view to_string(BoundaryKind b) {
  switch (b) {
    case BoundaryKind::none:
      return "none";
    case BoundaryKind::periodic:
      return "periodic";
    case BoundaryKind::dirichlet:
      return "dirichlet";
    case BoundaryKind::neumann:
      return "neumann";
  }
  return "none";
}

double SystemDescriptor::parameter(const std::string& key) const {
  auto it = parameters.find(key);
  if (it == parameters.end()) throw ConfigError("system '" + name + "' has no parameter '" + key + "'");
  return it->second;
}

void SystemDescriptor::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("time horizon T must be positive and finite");
  if (axes.empty() || axes.front() != "t") throw ConfigError("first axis of a system must be time");
  if (spatial_bounds.size() + 1 != axes.size()) throw ConfigError("one bound pair per spatial axis is required");
  if (boundaries.size() != spatial_bounds.size()) throw ConfigError("one boundary kind per spatial axis is required");
  for (const auto& [lo, hi] : spatial_bounds)
    if (!(lo < hi)) throw ConfigError("spatial bounds must satisfy lo < hi");
  for (const Partial& p : residual_partials) {
    if (p.order() > 2) throw CapabilityError("residuals may use derivatives of order <= 2");
    if (p.max_axis() >= input_width()) throw ConfigError("residual partial names an axis the system lacks");
  }
}

void SystemModel::residuals(const Bundle<double>& fields, std::span<double> out) const {
  Bundle<Var> vars;
  for (std::size_t i = 0; i < fields.size(); ++i) vars.set(fields.entry(i).channel, fields.entry(i).partial, fields.entry(i).value);
  std::vector<Var> r(out.size());
  residuals(vars, r);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = r[i].value();
}

double ac_piecewise_fixed_function(double x) {
  if (!(x >= -1.0 && x <= 1.0)) throw DomainError("piecewise fixed function is defined on [-1, 1]");
  return std::abs(x) <= 0.5 ? 0.0 : -1.0;
}

namespace {

FixedPoint constant_point(std::string label, Stability s, std::vector<double> value) {
  FixedPoint fp;
  fp.label = std::move(label);
  fp.stability = s;
  fp.constant_value = value;
  fp.field = [value](std::span<const double>, std::span<double> out) {
    std::copy(value.begin(), value.end(), out.begin());
  };
  return fp;
}

double number(const json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (!v.is_number()) throw ConfigError(std::string("system parameter '") + key + "' must be a number");
  return v.get<double>();
}

void reject_unknown(const json& params, std::initializer_list<const char*> known, std::string_view system) {
  for (const auto& [key, _] : params.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) == known.end())
      throw ConfigError("unknown parameter '" + key + "' for system '" + std::string(system) + "'");
  }
}

void require_finite(const SystemDescriptor& d) {
  for (const auto& [k, v] : d.parameters)
    if (!std::isfinite(v)) throw ConfigError("system parameter '" + k + "' is not finite");
}

class Pendulum final : public SystemModel {
 public:
  explicit Pendulum(SystemDescriptor d) : SystemModel(std::move(d)), g_(descriptor().parameter("g")), l_(descriptor().parameter("l")) {}
  void residuals(const Bundle<Var>& b, std::span<Var> out) const override { out[0] = pendulum_residual(b, g_, l_); }
  using SystemModel::residuals;
  void initial_condition(std::span<const double>, std::span<double> f) const override {
    f[0] = descriptor().parameter("y0");
  }

 private:
  double g_, l_;
};

class Toy final : public SystemModel {
 public:
  using SystemModel::SystemModel;
  void residuals(const Bundle<Var>& b, std::span<Var> out) const override { out[0] = toy_residual(b); }
  using SystemModel::residuals;
  void initial_condition(std::span<const double>, std::span<double> f) const override {
    f[0] = descriptor().parameter("y0");
  }
};

class AllenCahn final : public SystemModel {
 public:
  explicit AllenCahn(SystemDescriptor d)
      : SystemModel(std::move(d)), g1_(descriptor().parameter("gamma1")), g2_(descriptor().parameter("gamma2")) {}
  void residuals(const Bundle<Var>& b, std::span<Var> out) const override { out[0] = allen_cahn_residual(b, g1_, g2_); }
  using SystemModel::residuals;
  void initial_condition(std::span<const double> x, std::span<double> f) const override {
    f[0] = x[0] * x[0] * std::cos(std::numbers::pi * x[0]);
  }

 private:
  double g1_, g2_;
};

class NavierStokes final : public SystemModel {
 public:
  explicit NavierStokes(SystemDescriptor d) : SystemModel(std::move(d)), re_(descriptor().parameter("Re")) {}
  void residuals(const Bundle<Var>& b, std::span<Var> out) const override {
    auto r = navier_stokes_residuals(b, re_);
    out[0] = r[0];
    out[1] = r[1];
  }
  using SystemModel::residuals;
  // Fluid at rest; the wake problem supplies its own data.
  void initial_condition(std::span<const double>, std::span<double> f) const override {
    std::fill(f.begin(), f.end(), 0.0);
  }

 private:
  double re_;
};

SystemDescriptor pendulum_descriptor(const json& p) {
  reject_unknown(p, {"y0", "y0_deg", "ydot0", "g", "l", "T"}, "pendulum");
  if (p.contains("y0") && p.contains("y0_deg")) throw ConfigError("give the pendulum y0 in radians or degrees, not both");
  SystemDescriptor d;
  d.name = "pendulum";
  d.axes = {"t"};
  d.horizon = number(p, "T", 10.0);
  d.parameters = {{"g", number(p, "g", kGravity)},
                  {"l", number(p, "l", kRodLength)},
                  {"y0", p.contains("y0_deg") ? degrees_to_radians(number(p, "y0_deg", 0.0)) : number(p, "y0", 0.0)},
                  {"ydot0", number(p, "ydot0", 0.0)}};
  if (!(d.parameters["l"] > 0.0)) throw ConfigError("pendulum rod length must be positive");
  d.residual_partials = {d::value, d::tt};
  d.fixed_points = {constant_point("y=0", Stability::stable, {0.0}),
                    constant_point("y=pi", Stability::unstable, {std::numbers::pi})};
  return d;
}

SystemDescriptor toy_descriptor(const json& p) {
  reject_unknown(p, {"y0", "T"}, "toy");
  SystemDescriptor d;
  d.name = "toy";
  d.axes = {"t"};
  d.horizon = number(p, "T", 10.0);
  d.parameters = {{"y0", number(p, "y0", 0.5)}};
  d.residual_partials = {d::value, d::t};
  d.fixed_points = {constant_point("y=1", Stability::asymptotically_stable, {1.0}),
                    constant_point("y=-1", Stability::asymptotically_stable, {-1.0}),
                    constant_point("y=0", Stability::unstable, {0.0})};
  return d;
}

SystemDescriptor allen_cahn_descriptor(const json& p) {
  reject_unknown(p, {"gamma1", "gamma2", "T"}, "allen-cahn");
  SystemDescriptor d;
  d.name = "allen-cahn";
  d.axes = {"t", "x"};
  d.horizon = number(p, "T", 1.0);
  d.spatial_bounds = {{-1.0, 1.0}};
  d.boundaries = {BoundaryKind::periodic};
  d.parameters = {{"gamma1", number(p, "gamma1", kAllenCahnGamma1)}, {"gamma2", number(p, "gamma2", kAllenCahnGamma2)}};
  d.residual_partials = {d::value, d::t, d::xx};
  FixedPoint piecewise;
  piecewise.label = "piecewise";
  // The zero plateau is unstable, so any perturbation there grows.
  piecewise.stability = Stability::unstable;
  piecewise.constant = false;
  piecewise.field = [](std::span<const double> c, std::span<double> out) { out[0] = ac_piecewise_fixed_function(c[1]); };
  d.fixed_points = {constant_point("u=0", Stability::unstable, {0.0}),
                    constant_point("u=1", Stability::asymptotically_stable, {1.0}),
                    constant_point("u=-1", Stability::asymptotically_stable, {-1.0}), std::move(piecewise)};
  return d;
}

SystemDescriptor navier_stokes_descriptor(const json& p) {
  reject_unknown(p, {"Re", "T", "x_min", "x_max", "y_min", "y_max", "U"}, "navier-stokes");
  SystemDescriptor d;
  d.name = "navier-stokes";
  d.axes = {"t", "x", "y"};
  d.field_count = 3;
  d.residual_arity = 2;
  d.horizon = number(p, "T", 20.0);
  d.spatial_bounds = {{number(p, "x_min", 1.0), number(p, "x_max", 8.0)}, {number(p, "y_min", -2.0), number(p, "y_max", 2.0)}};
  d.boundaries = {BoundaryKind::none, BoundaryKind::none};
  d.parameters = {{"Re", number(p, "Re", 100.0)}, {"U", number(p, "U", 1.0)}};
  if (!(d.parameters["Re"] > 0.0)) throw ConfigError("Reynolds number must be positive");
  d.residual_partials = {d::value, d::t, d::x, d::y, d::xx, d::yy};
  d.fixed_points = {constant_point("quiescent", Stability::asymptotically_stable, {0.0, 0.0, 0.0}),
                    constant_point("uniform", Stability::stable, {d.parameters["U"], 0.0, 0.0})};
  return d;
}

}  // namespace

std::unique_ptr<SystemModel> make_system(std::string_view name, const json& params) {
  const json& p = params.is_null() ? json::object() : params;
  if (!p.is_object()) throw ConfigError("system parameters must be a JSON object");
  SystemDescriptor d;
  if (name == "pendulum") {
    d = pendulum_descriptor(p);
  } else if (name == "toy") {
    d = toy_descriptor(p);
  } else if (name == "allen-cahn" || name == "allen_cahn") {
    d = allen_cahn_descriptor(p);
  } else if (name == "navier-stokes" || name == "navier_stokes") {
    d = navier_stokes_descriptor(p);
  } else {
    throw ConfigError("unknown system '" + std::string(name) + "' (expected pendulum, toy, allen-cahn or navier-stokes)");
  }
  require_finite(d);
  if (d.name == "pendulum") return std::make_unique<Pendulum>(std::move(d));
  if (d.name == "toy") return std::make_unique<Toy>(std::move(d));
  if (d.name == "allen-cahn") return std::make_unique<AllenCahn>(std::move(d));
  return std::make_unique<NavierStokes>(std::move(d));
}

Bundle<double> fixed_point_bundle(const SystemDescriptor& sys, const FixedPoint& fp, std::span<const double> coords) {
  std::vector<double> values(static_cast<std::size_t>(sys.field_count));
  fp.field(coords, values);
  Bundle<double> b;
  for (int c = 0; c < sys.field_count; ++c)
    for (const Partial& m : sys.residual_partials) b.set(c, m, m.is_value() ? values[static_cast<std::size_t>(c)] : 0.0);
  return b;
}

}  // namespace pinnfp::systems
