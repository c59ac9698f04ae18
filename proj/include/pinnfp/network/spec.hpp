#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pinnfp::network {

enum class Activation { tanh, swish, sin };
enum class Initializer { glorot_uniform, he_uniform };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation a);
Initializer parse_initializer(std::string_view name);
std::string_view to_string(Initializer i);

/// Fully-connected architecture. Hidden layers use `activation`; the output layer is affine.
/// An empty hidden list is a single affine map.
struct NetworkSpec {
  int input_width = 1;
  std::vector<int> hidden_layers{50, 50, 50, 50};
  int output_width = 1;
  Activation activation = Activation::tanh;
  Initializer initializer = Initializer::glorot_uniform;
  std::uint64_t seed = 0;

  /// Throws ConfigError on non-positive widths.
  void validate() const;
  /// "4x50" for uniform hidden widths, "50-20-10" otherwise.
  std::string arch_label() const;
  int layer_count() const { return static_cast<int>(hidden_layers.size()) + 1; }

  bool operator==(const NetworkSpec&) const = default;
};

/// Parses "4x50" or "50-20-10" into hidden widths.
std::vector<int> parse_arch(std::string_view label);

struct LayerLayout {
  int fan_in = 0;
  int fan_out = 0;
  std::size_t weight_offset = 0;  // fan_out x fan_in, column-major
  bool operator==(const LayerLayout&) const = default;
  std::size_t bias_offset = 0;    // fan_out entries
};

/// Maps (layer, weight/bias) to index ranges of the flat parameter array.
class ParameterLayout {
 public:
  ParameterLayout() = default;
  explicit ParameterLayout(const NetworkSpec& spec);

  const std::vector<LayerLayout>& layers() const { return layers_; }
  const LayerLayout& layer(std::size_t i) const { return layers_.at(i); }
  std::size_t size() const { return size_; }
  bool operator==(const ParameterLayout&) const = default;

 private:
  std::vector<LayerLayout> layers_;
  std::size_t size_ = 0;
};

/// Flat array of all weights and biases plus its layout.
class ParameterVector {
 public:
  ParameterVector() = default;
  ParameterVector(ParameterLayout layout, std::vector<double> values);
  explicit ParameterVector(const NetworkSpec& spec);  // zero-filled

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }
  const ParameterLayout& layout() const { return layout_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> weights(std::size_t layer) const;
  std::span<double> weights(std::size_t layer);
  std::span<const double> biases(std::size_t layer) const;
  std::span<double> biases(std::size_t layer);

  bool operator==(const ParameterVector&) const = default;

 private:
  ParameterLayout layout_;
  std::vector<double> values_;
};

/// Weights uniform in the scheme's range, biases zero; reproducible from spec.seed.
ParameterVector init_params(const NetworkSpec& spec);

/// Uniform bound of the named scheme for a layer: sqrt(6/(fan_in+fan_out)) or sqrt(6/fan_in).
double init_bound(Initializer scheme, int fan_in, int fan_out);

/// All weights zero and output bias set to `output_value`: a network constant in its inputs.
ParameterVector constant_network(const NetworkSpec& spec, std::span<const double> output_value);

/// sigma^(k)(s) for k = 0..out.size()-1 (up to order 4).
void activation_derivatives(Activation a, double s, std::span<double> out);

}  // namespace pinnfp::network
