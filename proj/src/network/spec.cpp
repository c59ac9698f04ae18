#include "pinnfp/network/spec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "pinnfp/error.hpp"
#include "pinnfp/random.hpp"

namespace pinnfp::network {

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "swish" || name == "silu") return Activation::swish;
  if (name == "sin") return Activation::sin;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::tanh:
      return "tanh";
    case Activation::swish:
      return "swish";
    case Activation::sin:
      return "sin";
  }
  return "?";
}

Initializer parse_initializer(std::string_view name) {
  if (name == "glorot-uniform" || name == "glorot") return Initializer::glorot_uniform;
  if (name == "he-uniform" || name == "he") return Initializer::he_uniform;
  throw ConfigError("unknown initializer '" + std::string(name) + "'");
}

std::string_view to_string(Initializer i) {
  return i == Initializer::glorot_uniform ? "glorot-uniform" : "he-uniform";
}

void NetworkSpec::validate() const {
  if (input_width < 1) throw ConfigError("network input width must be >= 1");
  if (output_width < 1) throw ConfigError("network output width must be >= 1");
  for (int w : hidden_layers)
    if (w < 1) throw ConfigError("hidden layer widths must be >= 1");
}

std::string NetworkSpec::arch_label() const {
  if (hidden_layers.empty()) return "affine";
  if (!hidden_layers.empty() &&
      std::all_of(hidden_layers.begin(), hidden_layers.end(), [&](int w) { return w == hidden_layers.front(); }))
    return std::to_string(hidden_layers.size()) + "x" + std::to_string(hidden_layers.front());
  std::string out;
  for (std::size_t i = 0; i < hidden_layers.size(); ++i) out += (i ? "-" : "") + std::to_string(hidden_layers[i]);
  return out;
}

namespace {

int parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 1)
    throw ConfigError("invalid architecture component '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::vector<int> parse_arch(std::string_view label) {
  if (label == "affine") return {};
  if (auto x = label.find('x'); x != std::string_view::npos) {
    const int depth = parse_int(label.substr(0, x));
    const int width = parse_int(label.substr(x + 1));
    return std::vector<int>(static_cast<std::size_t>(depth), width);
  }
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= label.size()) {
    auto end = label.find('-', start);
    if (end == std::string_view::npos) end = label.size();
    out.push_back(parse_int(label.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

ParameterLayout::ParameterLayout(const NetworkSpec& spec) {
  spec.validate();
  int fan_in = spec.input_width;
  std::vector<int> widths = spec.hidden_layers;
  widths.push_back(spec.output_width);
  for (int fan_out : widths) {
    LayerLayout l;
    l.fan_in = fan_in;
    l.fan_out = fan_out;
    l.weight_offset = size_;
    size_ += static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(fan_out);
    l.bias_offset = size_;
    size_ += static_cast<std::size_t>(fan_out);
    layers_.push_back(l);
    fan_in = fan_out;
  }
}

ParameterVector::ParameterVector(ParameterLayout layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (values_.size() != layout_.size())
    throw ConfigError("parameter vector length " + std::to_string(values_.size()) + " does not match layout size " +
                      std::to_string(layout_.size()));
}

ParameterVector::ParameterVector(const NetworkSpec& spec)
    : layout_(spec), values_(layout_.size(), 0.0) {}

std::span<const double> ParameterVector::weights(std::size_t layer) const {
  const auto& l = layout_.layer(layer);
  return std::span<const double>(values_).subspan(l.weight_offset, l.bias_offset - l.weight_offset);
}

std::span<double> ParameterVector::weights(std::size_t layer) {
  const auto& l = layout_.layer(layer);
  return std::span<double>(values_).subspan(l.weight_offset, l.bias_offset - l.weight_offset);
}

std::span<const double> ParameterVector::biases(std::size_t layer) const {
  const auto& l = layout_.layer(layer);
  return std::span<const double>(values_).subspan(l.bias_offset, static_cast<std::size_t>(l.fan_out));
}

std::span<double> ParameterVector::biases(std::size_t layer) {
  const auto& l = layout_.layer(layer);
  return std::span<double>(values_).subspan(l.bias_offset, static_cast<std::size_t>(l.fan_out));
}

double init_bound(Initializer scheme, int fan_in, int fan_out) {
  switch (scheme) {
    case Initializer::glorot_uniform:
      return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    case Initializer::he_uniform:
      return std::sqrt(6.0 / static_cast<double>(fan_in));
  }
  throw ConfigError("unknown initializer");
}

ParameterVector init_params(const NetworkSpec& spec) {
  ParameterVector params(spec);
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < params.layout().layers().size(); ++i) {
    const auto& l = params.layout().layer(i);
    const double bound = init_bound(spec.initializer, l.fan_in, l.fan_out);
    for (double& w : params.weights(i)) w = rng.uniform(-bound, bound);
  }
  return params;
}

ParameterVector constant_network(const NetworkSpec& spec, std::span<const double> output_value) {
  if (output_value.size() != static_cast<std::size_t>(spec.output_width))
    throw ConfigError("constant network needs one value per output channel");
  ParameterVector params(spec);
  auto b = params.biases(params.layout().layers().size() - 1);
  std::copy(output_value.begin(), output_value.end(), b.begin());
  return params;
}

void activation_derivatives(Activation a, double s, std::span<double> out) {
  if (out.size() > 5) throw CapabilityError("activation derivatives available up to order 4");
  double d[5];
  switch (a) {
    case Activation::tanh: {
      const double t = std::tanh(s);
      const double q = 1.0 - t * t;
      d[0] = t;
      d[1] = q;
      d[2] = -2.0 * t * q;
      d[3] = q * (6.0 * t * t - 2.0);
      d[4] = q * (16.0 * t - 24.0 * t * t * t);
      break;
    }
    case Activation::sin: {
      const double sn = std::sin(s), cs = std::cos(s);
      d[0] = sn, d[1] = cs, d[2] = -sn, d[3] = -cs, d[4] = sn;
      break;
    }
    case Activation::swish: {
      // swish = s * p(s) with p the logistic sigmoid; swish^(n) = s p^(n) + n p^(n-1).
      const double p = 1.0 / (1.0 + std::exp(-s));
      const double q = p * (1.0 - p);
      const double p1 = q, p2 = q * (1.0 - 2.0 * p), p3 = q * (1.0 - 6.0 * q),
                   p4 = q * (1.0 - 2.0 * p) * (1.0 - 12.0 * q);
      d[0] = s * p;
      d[1] = s * p1 + p;
      d[2] = s * p2 + 2.0 * p1;
      d[3] = s * p3 + 3.0 * p2;
      d[4] = s * p4 + 4.0 * p3;
      break;
    }
  }
  std::copy_n(d, out.size(), out.begin());
}

}  // namespace pinnfp::network
