#pragma once

#include <filesystem>
#include <functional>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "pinnfp/systems/systems.hpp"

namespace pinnfp::oracles {

/// Values on a time grid, optionally times a periodic space grid.
/// values[(ti * max(1, nx) + xi) * components + c].
struct ReferenceSolution {
  std::vector<double> times;
  std::vector<double> space;  // empty for ODEs
  std::vector<std::string> components;
  std::vector<double> values;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t time_count() const { return times.size(); }
  std::size_t space_count() const { return space.empty() ? 1 : space.size(); }
  double at(std::size_t ti, std::size_t xi, std::size_t c) const {
    return values[(ti * space_count() + xi) * components.size() + c];
  }
  /// ODE accessor (no space grid).
  double at(std::size_t ti, std::size_t c = 0) const { return at(ti, 0, c); }

  /// Strictly increasing grids and a value array of matching shape; throws ConfigError otherwise.
  void validate() const;
  /// Piecewise-linear in t (and x); arguments are clamped to the grid.
  double interpolate(double t, std::size_t c = 0) const;
  double interpolate_field(double t, double x, std::size_t c = 0) const;
};

/// dy/dt = rhs(t, y).
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Classical RK4 with fixed step dt; the last step is shortened to land on T. Every step is recorded.
/// Throws ConfigError for dt <= 0 or T <= 0 and DivergenceError (with the step index) on a non-finite state.
ReferenceSolution rk4_integrate(const OdeRhs& rhs, std::span<const double> y0, double T, double dt,
                                std::vector<std::string> components = {});

/// Logistic-cubic closed form for y' = y(1 - y^2); sign(y0) (1 + (1/y0^2 - 1) e^{-2t})^{-1/2}.
double toy_analytic(double y0, double t);

/// E = ydot^2 / 2 - (g/l) cos(y).
double pendulum_energy(double y, double ydot, double g = systems::kGravity, double l = systems::kRodLength);

OdeRhs pendulum_rhs(double g = systems::kGravity, double l = systems::kRodLength);
OdeRhs toy_rhs();

/// Trajectory (y, ydot) of the undamped pendulum by RK4.
ReferenceSolution pendulum_reference(double y0, double ydot0, double T, double dt = 1e-3,
                                     double g = systems::kGravity, double l = systems::kRodLength);
/// Closed-form toy trajectory sampled on `n` equispaced times in [0, T].
ReferenceSolution toy_reference(double y0, double T, std::size_t n = 1000);

enum class Laplacian { spectral, central2 };
Laplacian parse_laplacian(std::string_view name);

struct AllenCahnOptions {
  int nx = 512;
  double dt = 1e-4;
  double T = 1.0;
  double gamma1 = systems::kAllenCahnGamma1;
  double gamma2 = systems::kAllenCahnGamma2;
  double snapshot_dt = 0.005;  // spacing of stored time slices
  Laplacian laplacian = Laplacian::spectral;
};

/// Method of lines on x in [-1, 1) (periodic, nx nodes) with RK4 in time from u(0, x) = x^2 cos(pi x).
/// The space grid of the result also carries the identified node x = 1. Requires nx >= 128 and
/// dt * gamma1 * rho <= 2 where rho bounds the discrete Laplacian spectrum (4/dx^2 for central
/// differences, (pi/dx)^2 for the Fourier one); violations raise ConfigError.
ReferenceSolution allen_cahn_reference(const AllenCahnOptions& opt);
ReferenceSolution allen_cahn_reference(int nx, double dt, double T);

/// Max-norm difference between two Allen-Cahn solutions at their shared space nodes and times.
/// The fine grid must refine the coarse one by an integer factor; both must share snapshot times.
double self_convergence_error(const ReferenceSolution& coarse, const ReferenceSolution& fine);

/// Header `t[,x],component...`, one row per grid node.
std::string reference_csv(const ReferenceSolution& ref);

struct FieldRecord {
  double t = 0, x = 0, y = 0, u = 0, v = 0, p = 0;
  bool operator==(const FieldRecord&) const = default;
};
using FieldDataset = std::vector<FieldRecord>;

/// CSV with header `t,x,y,u,v,p`; malformed rows raise ParseError with the line number.
FieldDataset load_field_snapshots(const std::filesystem::path& path);
FieldDataset parse_field_snapshots(std::string_view text);
std::string field_snapshots_csv(const FieldDataset& data);

}  // namespace pinnfp::oracles
