#include "pinnfp/autodiff/network_jets.hpp"

#include <string>

#include "pinnfp/error.hpp"

namespace pinnfp::autodiff {

using Eigen::ArrayXXd;
using Eigen::Index;
using Eigen::MatrixXd;

namespace {

using ConstMatMap = Eigen::Map<const MatrixXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using MatMap = Eigen::Map<MatrixXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

}  // namespace

void activation_arrays(network::Activation a, const ArrayXXd& s, int max_order, std::vector<ArrayXXd>& out) {
  if (max_order > 4) throw CapabilityError("activation derivatives available up to order 4");
  out.resize(static_cast<std::size_t>(max_order) + 1);
  switch (a) {
    case network::Activation::tanh: {
      out[0] = s.tanh();
      if (max_order < 1) break;
      const ArrayXXd& t = out[0];
      ArrayXXd& q = out[1];
      q = 1.0 - t.square();
      if (max_order >= 2) out[2] = -2.0 * t * q;
      if (max_order >= 3) out[3] = q * (6.0 * t.square() - 2.0);
      if (max_order >= 4) out[4] = q * t * (16.0 - 24.0 * t.square());
      break;
    }
    case network::Activation::sin: {
      out[0] = s.sin();
      if (max_order >= 1) out[1] = s.cos();
      if (max_order >= 2) out[2] = -out[0];
      if (max_order >= 3) out[3] = -out[1];
      if (max_order >= 4) out[4] = out[0];
      break;
    }
    case network::Activation::swish: {
      ArrayXXd p = 1.0 / (1.0 + (-s).exp());
      ArrayXXd q = p * (1.0 - p);
      ArrayXXd p2, p3;
      out[0] = s * p;
      if (max_order >= 1) out[1] = s * q + p;
      if (max_order >= 2) {
        p2 = q * (1.0 - 2.0 * p);
        out[2] = s * p2 + 2.0 * q;
      }
      if (max_order >= 3) {
        p3 = q * (1.0 - 6.0 * q);
        out[3] = s * p3 + 3.0 * p2;
      }
      if (max_order >= 4) out[4] = s * (p2 * (1.0 - 12.0 * q)) + 4.0 * p3;
      break;
    }
  }
}

NetworkJetBatch::NetworkJetBatch(network::NetworkSpec spec, PartialSet partials)
    : spec_(std::move(spec)), layout_(spec_), partials_(std::move(partials)) {
  if (partials_.min_input_width() > spec_.input_width)
    throw ConfigError("derivative request names an axis beyond the network input width " +
                      std::to_string(spec_.input_width));
}

void NetworkJetBatch::forward(std::span<const double> params, const Eigen::Ref<const MatrixXd>& points, bool record) {
  if (params.size() != layout_.size())
    throw ConfigError("parameter count " + std::to_string(params.size()) + " does not match network layout " +
                      std::to_string(layout_.size()));
  if (points.rows() != spec_.input_width)
    throw ConfigError("point dimension " + std::to_string(points.rows()) + " does not match network input width " +
                      std::to_string(spec_.input_width));
  // Owned, aligned copy: Eigen's vectorized kernels then see the same alignment on every call,
  // which keeps results bitwise reproducible regardless of where the caller's buffer lives.
  params_ = Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Index>(params.size()));
  const double* theta = params_.data();
  n_ = static_cast<int>(points.cols());
  const Index n = n_;
  const Index k_count = static_cast<Index>(partials_.size());
  const int max_order = partials_.max_order();
  const int deriv_order = record ? max_order + 1 : max_order;

  input_.setZero(spec_.input_width, k_count * n);
  input_.leftCols(n) = points;
  for (Index k = 1; k < k_count; ++k) {
    const Partial& p = partials_[static_cast<std::size_t>(k)];
    if (p.order() == 1) input_.row(p.max_axis()).segment(k * n, n).setOnes();
  }

  const auto n_layers = layout_.layers().size();
  layers_.resize(n_layers - 1);
  const MatrixXd* prev = &input_;
  for (std::size_t li = 0; li + 1 < n_layers; ++li) {
    const auto& l = layout_.layer(li);
    ConstMatMap w(theta + l.weight_offset, l.fan_out, l.fan_in);
    ConstVecMap b(theta + l.bias_offset, l.fan_out);
    Layer& layer = layers_[li];
    layer.s.noalias() = w * (*prev);
    layer.s.leftCols(n).colwise() += b;
    activation_arrays(spec_.activation, layer.s.leftCols(n).array(), deriv_order, layer.d);

    layer.h.resize(l.fan_out, k_count * n);
    layer.h.leftCols(n) = layer.d[0].matrix();
    for (Index k = 1; k < k_count; ++k) {
      auto hk = layer.h.middleCols(k * n, n).array();
      hk.setZero();
      for (const ChainTerm& term : partials_.chain_terms(static_cast<std::size_t>(k))) {
        scratch_ = term.coeff * layer.d[static_cast<std::size_t>(term.order)];
        for (int blk : term.blocks) scratch_ *= layer.s.middleCols(blk * n, n).array();
        hk += scratch_;
      }
    }
    prev = &layer.h;
  }

  const auto& lo = layout_.layer(n_layers - 1);
  ConstMatMap w(theta + lo.weight_offset, lo.fan_out, lo.fan_in);
  ConstVecMap b(theta + lo.bias_offset, lo.fan_out);
  out_.noalias() = w * (*prev);
  out_.leftCols(n).colwise() += b;
  recorded_ = record;
}

void NetworkJetBatch::backward(const Eigen::Ref<const MatrixXd>& output_adjoint, std::span<double> grad) const {
  if (!recorded_) throw ConfigError("backward() needs a recorded forward pass");
  if (grad.size() != layout_.size()) throw ConfigError("gradient buffer does not match network layout");
  if (output_adjoint.rows() != out_.rows() || output_adjoint.cols() != out_.cols())
    throw ConfigError("output adjoint shape does not match network outputs");
  const Index n = n_;
  const Index k_count = static_cast<Index>(partials_.size());
  const auto n_layers = layout_.layers().size();
  grad_.setZero(static_cast<Index>(layout_.size()));
  double* g = grad_.data();

  const auto& lo = layout_.layer(n_layers - 1);
  const MatrixXd& last_h = n_layers > 1 ? layers_.back().h : input_;
  {
    MatMap gw(g + lo.weight_offset, lo.fan_out, lo.fan_in);
    VecMap gb(g + lo.bias_offset, lo.fan_out);
    gw.noalias() += output_adjoint * last_h.transpose();
    gb += output_adjoint.leftCols(n).rowwise().sum();
  }
  ConstMatMap w_out(params_.data() + lo.weight_offset, lo.fan_out, lo.fan_in);
  MatrixXd& h_bar = h_bar_;
  MatrixXd& s_bar = s_bar_;
  h_bar.noalias() = w_out.transpose() * output_adjoint;

  for (std::size_t li = n_layers - 1; li-- > 0;) {
    const Layer& layer = layers_[li];
    const auto& l = layout_.layer(li);
    s_bar.setZero(l.fan_out, k_count * n);
    s_bar.leftCols(n).array() = h_bar.leftCols(n).array() * layer.d[1];
    for (Index k = 1; k < k_count; ++k) {
      const auto hb = h_bar.middleCols(k * n, n).array();
      for (const ChainTerm& term : partials_.chain_terms(static_cast<std::size_t>(k))) {
        ArrayXXd& scaled = scaled_;
        ArrayXXd& all = scratch_;
        scaled = term.coeff * hb;
        all = scaled * layer.d[static_cast<std::size_t>(term.order) + 1];
        for (int blk : term.blocks) all *= layer.s.middleCols(blk * n, n).array();
        s_bar.leftCols(n).array() += all;
        for (std::size_t j = 0; j < term.blocks.size(); ++j) {
          ArrayXXd& part = part_;
          part = scaled * layer.d[static_cast<std::size_t>(term.order)];
          for (std::size_t i = 0; i < term.blocks.size(); ++i)
            if (i != j) part *= layer.s.middleCols(term.blocks[i] * n, n).array();
          s_bar.middleCols(term.blocks[j] * n, n).array() += part;
        }
      }
    }
    const MatrixXd& prev = li > 0 ? layers_[li - 1].h : input_;
    MatMap gw(g + l.weight_offset, l.fan_out, l.fan_in);
    VecMap gb(g + l.bias_offset, l.fan_out);
    gw.noalias() += s_bar * prev.transpose();
    gb += s_bar.leftCols(n).rowwise().sum();
    if (li > 0) {
      ConstMatMap w(params_.data() + l.weight_offset, l.fan_out, l.fan_in);
      h_bar.noalias() = w.transpose() * s_bar;
    }
  }
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
}

DerivativeBundle evaluate_with_input_derivatives(const network::NetworkSpec& spec, std::span<const double> params,
                                                 std::span<const double> point, std::span<const Partial> request) {
  spec.validate();
  if (point.size() != static_cast<std::size_t>(spec.input_width))
    throw ConfigError("point dimension " + std::to_string(point.size()) + " does not match network input width " +
                      std::to_string(spec.input_width));
  NetworkJetBatch batch(spec, PartialSet(request));
  Eigen::MatrixXd pts = Eigen::Map<const Eigen::VectorXd>(point.data(), static_cast<Index>(point.size()));
  batch.forward(params, pts, false);
  DerivativeBundle out;
  for (int c = 0; c < spec.output_width; ++c)
    for (std::size_t k = 0; k < batch.partials().size(); ++k) out.set(c, batch.partials()[k], batch.output(c, k, 0));
  return out;
}

}  // namespace pinnfp::autodiff
