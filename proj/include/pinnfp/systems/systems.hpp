#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pinnfp/autodiff/bundle.hpp"
#include "pinnfp/autodiff/partial.hpp"
#include "pinnfp/autodiff/tape.hpp"

namespace pinnfp::systems {

using autodiff::Bundle;
using autodiff::Partial;
using autodiff::Var;

namespace d {
inline const Partial value{};
inline const Partial t = Partial::along({0});
inline const Partial tt = Partial::along({0, 0});
inline const Partial x = Partial::along({1});
inline const Partial xx = Partial::along({1, 1});
inline const Partial y = Partial::along({2});
inline const Partial yy = Partial::along({2, 2});
}  // namespace d

inline constexpr double kGravity = 9.81;
inline constexpr double kRodLength = 1.0;
inline constexpr double kAllenCahnGamma1 = 1e-4;
inline constexpr double kAllenCahnGamma2 = 5.0;

enum class Stability { stable, asymptotically_stable, unstable };
std::string_view to_string(Stability s);

enum class BoundaryKind { none, periodic, dirichlet, neumann };
std::string_view to_string(BoundaryKind b);

/// Steady solution u* with F[u*] = 0; derivatives vanish almost everywhere.
struct FixedPoint {
  std::string label;
  Stability stability = Stability::unstable;
  /// Field values at space-time coordinates (t, x, ...).
  std::function<void(std::span<const double> coords, std::span<double> fields)> field;
  /// True when the field is the same constant everywhere (representable by a zero-weight network).
  bool constant = true;
  std::vector<double> constant_value;
};

struct SystemDescriptor {
  std::string name;
  std::vector<std::string> axes;           // "t" first, then spatial axes
  int field_count = 1;
  int residual_arity = 1;
  double horizon = 1.0;                    // T
  std::vector<std::pair<double, double>> spatial_bounds;
  std::vector<BoundaryKind> boundaries;    // one per spatial axis
  std::map<std::string, double> parameters;
  std::vector<Partial> residual_partials;  // field partials the residual reads
  std::vector<FixedPoint> fixed_points;

  int input_width() const { return static_cast<int>(axes.size()); }
  double parameter(const std::string& key) const;
  /// Throws ConfigError unless T > 0, bounds are well ordered and orders are <= 2.
  void validate() const;
};

/// f = y_tt + (g/l) sin(y)
template <typename T>
T pendulum_residual(const Bundle<T>& b, double g = kGravity, double l = kRodLength) {
  using std::sin;
  using autodiff::sin;
  return b.at(0, d::tt) + T(g / l) * sin(b.at(0, d::value));
}

/// f = y_t - y (1 - y^2)
template <typename T>
T toy_residual(const Bundle<T>& b) {
  const T& y = b.at(0, d::value);
  return b.at(0, d::t) - y * (T(1.0) - y * y);
}

/// f = u_t - gamma1 u_xx - gamma2 (u - u^3)
template <typename T>
T allen_cahn_residual(const Bundle<T>& b, double gamma1 = kAllenCahnGamma1, double gamma2 = kAllenCahnGamma2) {
  const T& u = b.at(0, d::value);
  return b.at(0, d::t) - T(gamma1) * b.at(0, d::xx) - T(gamma2) * (u - u * u * u);
}

/// Momentum residuals for fields (u, v, p) = channels (0, 1, 2):
/// f_x = u_t + u u_x + v u_y + p_x - (u_xx + u_yy)/Re, f_y likewise.
template <typename T>
std::array<T, 2> navier_stokes_residuals(const Bundle<T>& b, double reynolds) {
  const T& u = b.at(0, d::value);
  const T& v = b.at(1, d::value);
  const T inv_re(1.0 / reynolds);
  T fx = b.at(0, d::t) + (u * b.at(0, d::x) + v * b.at(0, d::y)) + b.at(2, d::x) -
         inv_re * (b.at(0, d::xx) + b.at(0, d::yy));
  T fy = b.at(1, d::t) + (u * b.at(1, d::x) + v * b.at(1, d::y)) + b.at(2, d::y) -
         inv_re * (b.at(1, d::xx) + b.at(1, d::yy));
  return {fx, fy};
}

/// Piecewise-constant Allen-Cahn steady state: 0 on [-0.5, 0.5], -1 elsewhere in [-1, 1].
double ac_piecewise_fixed_function(double x);

/// Residual operator and metadata of one dynamical system.
class SystemModel {
 public:
  explicit SystemModel(SystemDescriptor descriptor) : descriptor_(std::move(descriptor)) { descriptor_.validate(); }
  virtual ~SystemModel() = default;

  const SystemDescriptor& descriptor() const { return descriptor_; }
  const std::string& name() const { return descriptor_.name; }
  int arity() const { return descriptor_.residual_arity; }

  virtual void residuals(const Bundle<Var>& fields, std::span<Var> out) const = 0;
  void residuals(const Bundle<double>& fields, std::span<double> out) const;

  /// Initial value of each field at spatial coordinates (empty for ODEs).
  virtual void initial_condition(std::span<const double> spatial, std::span<double> fields) const = 0;

 private:
  SystemDescriptor descriptor_;
};

/// "pendulum", "toy", "allen-cahn" or "navier-stokes". Recognised parameters:
/// pendulum {y0 | y0_deg, ydot0, g, l, T}; toy {y0, T}; allen-cahn {gamma1, gamma2, T};
/// navier-stokes {Re, T, x_min, x_max, y_min, y_max}.
std::unique_ptr<SystemModel> make_system(std::string_view name, const nlohmann::json& params = nlohmann::json::object());

/// Fields with every derivative requested by the residual set to zero and values from `fp` at `coords`.
Bundle<double> fixed_point_bundle(const SystemDescriptor& sys, const FixedPoint& fp, std::span<const double> coords);

inline double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }
inline double radians_to_degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace pinnfp::systems
