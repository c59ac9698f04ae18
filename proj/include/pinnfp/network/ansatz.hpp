#pragma once

#include <memory>
#include <span>
#include <vector>

#include "pinnfp/autodiff/bundle.hpp"
#include "pinnfp/autodiff/partial.hpp"
#include "pinnfp/autodiff/tape.hpp"

namespace pinnfp::network {

using autodiff::Bundle;
using autodiff::Partial;
using autodiff::Var;

inline constexpr int kTimeAxis = 0;
inline constexpr int kXAxis = 1;
inline constexpr int kYAxis = 2;

/// Hard initial-condition wrapper y^(t) = y0 + t * y(t) applied to a jet bundle.
///
/// By Leibniz with the linear factor t, a partial carrying k time derivatives maps to
/// t * y_m + k * y_{m - t}. The value at t = 0 is y0 for any parameters.
template <typename T>
Bundle<T> wrap_hard_ic(const Bundle<T>& net, double t, double y0, int channel = 0) {
  Bundle<T> out;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& e = net.entry(i);
    if (e.channel != channel) continue;
    const int k = e.partial.count(kTimeAxis);
    if (k == 0) {
      T v = T(t) * e.value;
      if (e.partial.is_value()) v = T(y0) + v;
      out.set(channel, e.partial, v);
      continue;
    }
    // Lower partial m - t: rebuild from the axis list minus one time derivative.
    auto axes = e.partial.axes();
    axes.erase(axes.begin());
    const Partial lower = Partial::along(axes);
    if (!net.has(channel, lower)) continue;
    out.set(channel, e.partial, T(t) * e.value + T(static_cast<double>(k)) * net.at(channel, lower));
  }
  return out;
}

/// Partials of the stream function psi and pressure needed so that u = psi_y, v = -psi_x and p
/// are available with the given field partials.
std::vector<Partial> stream_function_network_partials(std::span<const Partial> field_partials);

/// Velocities from a stream-function head: network channels (psi, p) -> fields (u, v, p)
/// with u_m = psi_{m+y}, v_m = -psi_{m+x}. Continuity u_x + v_y = psi_xy - psi_xy = 0 holds
/// exactly since the mixed partial is a single stored entry.
template <typename T>
Bundle<T> stream_function_velocities(const Bundle<T>& net, std::span<const Partial> field_partials) {
  Bundle<T> out;
  for (const Partial& m : field_partials) {
    out.set(0, m, net.at(0, m.plus(kYAxis)));
    out.set(1, m, -net.at(0, m.plus(kXAxis)));
    out.set(2, m, net.at(1, m));
  }
  return out;
}

/// Maps network outputs to the physical fields a residual is written in.
class Ansatz {
 public:
  virtual ~Ansatz() = default;
  virtual int network_outputs() const = 0;
  virtual int field_count() const = 0;
  virtual std::vector<Partial> network_partials(std::span<const Partial> field_partials) const = 0;
  virtual Bundle<Var> apply(std::span<const double> point, const Bundle<Var>& net,
                            std::span<const Partial> field_partials) const = 0;
  Bundle<double> apply(std::span<const double> point, const Bundle<double>& net,
                       std::span<const Partial> field_partials) const;
};

/// Fields are the network outputs.
class IdentityAnsatz final : public Ansatz {
 public:
  explicit IdentityAnsatz(int channels) : channels_(channels) {}
  int network_outputs() const override { return channels_; }
  int field_count() const override { return channels_; }
  std::vector<Partial> network_partials(std::span<const Partial> field_partials) const override;
  Bundle<Var> apply(std::span<const double> point, const Bundle<Var>& net,
                    std::span<const Partial> field_partials) const override;
  using Ansatz::apply;

 private:
  int channels_;
};

/// Single-output ODE network wrapped as y0 + t * y(t); time is input 0.
class HardIcAnsatz final : public Ansatz {
 public:
  explicit HardIcAnsatz(double y0) : y0_(y0) {}
  double y0() const { return y0_; }
  int network_outputs() const override { return 1; }
  int field_count() const override { return 1; }
  std::vector<Partial> network_partials(std::span<const Partial> field_partials) const override;
  Bundle<Var> apply(std::span<const double> point, const Bundle<Var>& net,
                    std::span<const Partial> field_partials) const override;
  using Ansatz::apply;

 private:
  double y0_;
};

/// Network (psi, p) on inputs (t, x, y) -> fields (u, v, p).
class StreamFunctionAnsatz final : public Ansatz {
 public:
  int network_outputs() const override { return 2; }
  int field_count() const override { return 3; }
  std::vector<Partial> network_partials(std::span<const Partial> field_partials) const override;
  Bundle<Var> apply(std::span<const double> point, const Bundle<Var>& net,
                    std::span<const Partial> field_partials) const override;
  using Ansatz::apply;
};

}  // namespace pinnfp::network
