#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "pinnfp/autodiff/bundle.hpp"
#include "pinnfp/autodiff/jet.hpp"
#include "pinnfp/autodiff/partial.hpp"
#include "pinnfp/network/spec.hpp"

namespace pinnfp::autodiff {

/// A batch of points pushed through a fully-connected network as truncated Taylor jets.
///
/// Every hidden state is stored as a (width x K*N) matrix whose K column blocks hold the value
/// and each partial of the PartialSet for all N points, so one GEMM per layer advances every
/// derivative at once. forward() keeps the per-layer pre-activations and activation
/// derivatives; that record is the tape replayed by backward(), which returns
/// d/dtheta of sum(adjoint .* outputs). This is how residuals built from input derivatives
/// become differentiable in the parameters.
class NetworkJetBatch {
 public:
  NetworkJetBatch(network::NetworkSpec spec, PartialSet partials);

  /// `points` is input_width x N. With record=false only the outputs are kept.
  void forward(std::span<const double> params, const Eigen::Ref<const Eigen::MatrixXd>& points, bool record = true);

  /// grad += d/dtheta sum_ij adjoint(i, j) * outputs(i, j). Requires a recorded forward().
  void backward(const Eigen::Ref<const Eigen::MatrixXd>& output_adjoint, std::span<double> grad) const;

  const network::NetworkSpec& spec() const { return spec_; }
  const PartialSet& partials() const { return partials_; }
  int point_count() const { return n_; }

  /// output_width x (K*N); column k*N + i is partial k at point i.
  const Eigen::MatrixXd& outputs() const { return out_; }
  double output(int channel, std::size_t partial, int point) const {
    return out_(channel, static_cast<Eigen::Index>(partial) * n_ + point);
  }

 private:
  struct Layer {
    Eigen::MatrixXd s;                  // pre-activation jets
    Eigen::MatrixXd h;                  // post-activation jets
    std::vector<Eigen::ArrayXXd> d;     // sigma^(r)(s value block), r = 0..R
  };

  network::NetworkSpec spec_;
  network::ParameterLayout layout_;
  PartialSet partials_;
  int n_ = 0;
  Eigen::VectorXd params_;
  mutable Eigen::VectorXd grad_;
  Eigen::MatrixXd input_;
  std::vector<Layer> layers_;
  Eigen::MatrixXd out_;
  bool recorded_ = false;
  // Reused work buffers; large temporaries are otherwise re-mapped on every call.
  mutable Eigen::ArrayXXd scratch_, scaled_, part_;
  mutable Eigen::MatrixXd h_bar_, s_bar_;
};

/// Value and requested input derivatives of every output channel at one point.
/// Orders up to 3 are supported (the stream-function head needs third derivatives of psi).
DerivativeBundle evaluate_with_input_derivatives(const network::NetworkSpec& spec, std::span<const double> params,
                                                 std::span<const double> point, std::span<const Partial> request);

/// Elementwise sigma^(r)(s) for r = 0..max_order.
void activation_arrays(network::Activation a, const Eigen::ArrayXXd& s, int max_order,
                       std::vector<Eigen::ArrayXXd>& out);

template <typename T>
Jet<T> activate(network::Activation a, const Jet<T>& s) {
  switch (a) {
    case network::Activation::tanh:
      return tanh(s);
    case network::Activation::swish:
      return s * sigmoid(s);
    case network::Activation::sin:
      return sin(s);
  }
  throw ConfigError("unknown activation");
}

/// Scalar reference route: propagates second-order Jets neuron by neuron. With T = Var every
/// operation lands on the tape, so gradients of any jet coefficient in the parameters follow
/// from Tape::backward. Slow; used as an independent check of NetworkJetBatch.
template <typename T>
std::vector<Jet<T>> network_jets(const network::NetworkSpec& spec, std::span<const T> params,
                                 std::span<const double> point, std::span<const int> axes) {
  const network::ParameterLayout layout(spec);
  if (params.size() != layout.size()) throw ConfigError("parameter count does not match network layout");
  if (point.size() != static_cast<std::size_t>(spec.input_width))
    throw ConfigError("point dimension does not match network input width");
  const int slots = static_cast<int>(axes.size());
  std::vector<Jet<T>> h;
  for (int i = 0; i < spec.input_width; ++i) {
    int slot = -1;
    for (int k = 0; k < slots; ++k)
      if (axes[static_cast<std::size_t>(k)] == i) slot = k;
    h.push_back(slot >= 0 ? Jet<T>::seeded(T(point[static_cast<std::size_t>(i)]), slots, slot)
                          : Jet<T>::constant(T(point[static_cast<std::size_t>(i)]), slots));
  }
  const auto n_layers = layout.layers().size();
  for (std::size_t li = 0; li < n_layers; ++li) {
    const auto& l = layout.layer(li);
    std::vector<Jet<T>> next;
    next.reserve(static_cast<std::size_t>(l.fan_out));
    for (int j = 0; j < l.fan_out; ++j) {
      Jet<T> s = Jet<T>::constant(params[l.bias_offset + static_cast<std::size_t>(j)], slots);
      for (int i = 0; i < l.fan_in; ++i) {
        const T& w = params[l.weight_offset + static_cast<std::size_t>(i) * static_cast<std::size_t>(l.fan_out) +
                            static_cast<std::size_t>(j)];
        s = s + w * h[static_cast<std::size_t>(i)];
      }
      next.push_back(li + 1 < n_layers ? activate(spec.activation, s) : s);
    }
    h = std::move(next);
  }
  return h;
}

}  // namespace pinnfp::autodiff
