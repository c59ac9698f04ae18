#include "pinnfp/network/ansatz.hpp"

#include <algorithm>

namespace pinnfp::network {

namespace {

Bundle<Var> to_var(const Bundle<double>& b) {
  Bundle<Var> out;
  for (std::size_t i = 0; i < b.size(); ++i) out.set(b.entry(i).channel, b.entry(i).partial, Var(b.entry(i).value));
  return out;
}

Bundle<double> to_double(const Bundle<Var>& b) {
  Bundle<double> out;
  for (std::size_t i = 0; i < b.size(); ++i) out.set(b.entry(i).channel, b.entry(i).partial, b.entry(i).value.value());
  return out;
}

}  // namespace

Bundle<double> Ansatz::apply(std::span<const double> point, const Bundle<double>& net,
                             std::span<const Partial> field_partials) const {
  return to_double(apply(point, to_var(net), field_partials));
}

std::vector<Partial> stream_function_network_partials(std::span<const Partial> field_partials) {
  std::vector<Partial> out;
  for (const Partial& m : field_partials) {
    out.push_back(m.plus(kXAxis));
    out.push_back(m.plus(kYAxis));
    out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Partial> IdentityAnsatz::network_partials(std::span<const Partial> field_partials) const {
  return {field_partials.begin(), field_partials.end()};
}

Bundle<Var> IdentityAnsatz::apply(std::span<const double>, const Bundle<Var>& net,
                                  std::span<const Partial> field_partials) const {
  Bundle<Var> out;
  for (int c = 0; c < channels_; ++c)
    for (const Partial& m : field_partials) out.set(c, m, net.at(c, m));
  return out;
}

std::vector<Partial> HardIcAnsatz::network_partials(std::span<const Partial> field_partials) const {
  return {field_partials.begin(), field_partials.end()};
}

Bundle<Var> HardIcAnsatz::apply(std::span<const double> point, const Bundle<Var>& net,
                                std::span<const Partial> field_partials) const {
  Bundle<Var> wrapped = wrap_hard_ic(net, point[kTimeAxis], y0_);
  Bundle<Var> out;
  for (const Partial& m : field_partials) out.set(0, m, wrapped.at(0, m));
  return out;
}

std::vector<Partial> StreamFunctionAnsatz::network_partials(std::span<const Partial> field_partials) const {
  return stream_function_network_partials(field_partials);
}

Bundle<Var> StreamFunctionAnsatz::apply(std::span<const double>, const Bundle<Var>& net,
                                        std::span<const Partial> field_partials) const {
  return stream_function_velocities(net, field_partials);
}

}  // namespace pinnfp::network
