#include "pinnfp/training/loss.hpp"

#include <algorithm>
#include <cmath>

#include "pinnfp/error.hpp"

namespace pinnfp::training {

using autodiff::Bundle;
using autodiff::Var;

LossTerm residual_term(Eigen::MatrixXd points) {
  LossTerm t;
  t.kind = LossTerm::Kind::residual;
  t.name = "residual";
  t.points = std::move(points);
  return t;
}

LossModel::LossModel(std::shared_ptr<const systems::SystemModel> system, std::shared_ptr<const network::Ansatz> ansatz,
                     network::NetworkSpec spec)
    : system_(std::move(system)), ansatz_(std::move(ansatz)), spec_(std::move(spec)), layout_(spec_) {
  spec_.validate();
  if (spec_.input_width != system_->descriptor().input_width())
    throw ConfigError("network input width " + std::to_string(spec_.input_width) + " does not match system '" +
                      system_->name() + "' (" + std::to_string(system_->descriptor().input_width()) + " inputs)");
  if (spec_.output_width != ansatz_->network_outputs())
    throw ConfigError("network output width " + std::to_string(spec_.output_width) + " does not match the ansatz (" +
                      std::to_string(ansatz_->network_outputs()) + " outputs)");
  if (ansatz_->field_count() != system_->descriptor().field_count)
    throw ConfigError("ansatz field count does not match system '" + system_->name() + "'");
  tape_.reserve(256);
}

autodiff::NetworkJetBatch& LossModel::batch_for(const std::vector<Partial>& field_partials) {
  auto it = batches_.find(field_partials);
  if (it == batches_.end()) {
    const auto net_partials = ansatz_->network_partials(field_partials);
    it = batches_
             .emplace(field_partials,
                      std::make_unique<autodiff::NetworkJetBatch>(spec_, autodiff::PartialSet(net_partials)))
             .first;
  }
  return *it->second;
}

namespace {

std::vector<Partial> unique_partials(const std::vector<FieldComponent>& comps) {
  std::vector<Partial> out;
  for (const auto& c : comps) out.push_back(c.partial);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

double LossModel::evaluate(const LossTerm& term, std::span<const double> params, std::span<double> grad, double scale) {
  if (params.size() != layout_.size()) throw ConfigError("parameter count does not match network layout");
  const bool want_grad = !grad.empty();
  if (want_grad && grad.size() != layout_.size()) throw ConfigError("gradient buffer does not match network layout");
  const auto n = static_cast<Eigen::Index>(term.count());
  if (n == 0) return 0.0;
  if (term.points.rows() != spec_.input_width) throw ConfigError("loss term points do not match network input width");

  std::vector<Partial> field_partials;
  Eigen::MatrixXd joined;
  const Eigen::MatrixXd* pts = &term.points;
  int groups = 1;
  switch (term.kind) {
    case LossTerm::Kind::residual:
      field_partials = system_->descriptor().residual_partials;
      break;
    case LossTerm::Kind::targets:
      if (term.values.rows() != static_cast<Eigen::Index>(term.components.size()) || term.values.cols() != n)
        throw ConfigError("target values do not match components x points");
      field_partials = unique_partials(term.components);
      break;
    case LossTerm::Kind::periodic:
      if (term.partners.rows() != term.points.rows() || term.partners.cols() != n)
        throw ConfigError("periodic partners do not match points");
      field_partials = unique_partials(term.components);
      joined.resize(term.points.rows(), 2 * n);
      joined << term.points, term.partners;
      pts = &joined;
      groups = 2;
      break;
  }
  for (const auto& c : term.components)
    if (c.field < 0 || c.field >= ansatz_->field_count()) throw ConfigError("loss component names an unknown field");

  autodiff::NetworkJetBatch& batch = batch_for(field_partials);
  batch.forward(params, *pts, want_grad);
  const auto& partials = batch.partials();
  const auto k_count = partials.size();
  const int channels = spec_.output_width;
  const Eigen::Index cols = pts->cols();
  const Eigen::MatrixXd& out = batch.outputs();
  if (want_grad) adjoint_.setZero(out.rows(), out.cols());

  const int arity = system_->arity();
  std::vector<Var> residuals(static_cast<std::size_t>(arity));
  std::vector<Var> leaves(k_count * static_cast<std::size_t>(channels) * static_cast<std::size_t>(groups));
  const double weight = 1.0 / static_cast<double>(n);
  double total = 0.0;
  Bundle<Var> net;
  Bundle<Var> fields[2];

  for (Eigen::Index i = 0; i < n; ++i) {
    try {
      tape_.clear();
      for (int g = 0; g < groups; ++g) {
        const Eigen::Index col = i + g * n;
        net.clear();
        for (std::size_t k = 0; k < k_count; ++k)
          for (int c = 0; c < channels; ++c) {
            const double v = out(c, static_cast<Eigen::Index>(k) * cols + col);
            Var leaf = want_grad ? tape_.variable(v) : Var(v);
            leaves[(static_cast<std::size_t>(g) * k_count + k) * static_cast<std::size_t>(channels) +
                   static_cast<std::size_t>(c)] = leaf;
            net.set(c, partials[k], leaf);
          }
        const Eigen::VectorXd point = pts->col(col);
        fields[g] = ansatz_->apply(std::span<const double>(point.data(), static_cast<std::size_t>(point.size())), net,
                                   field_partials);
      }
      Var sq(0.0);
      switch (term.kind) {
        case LossTerm::Kind::residual:
          system_->residuals(fields[0], residuals);
          for (const Var& r : residuals) sq += r * r;
          break;
        case LossTerm::Kind::targets:
          for (std::size_t c = 0; c < term.components.size(); ++c) {
            const auto& comp = term.components[c];
            Var e = fields[0].at(comp.field, comp.partial) - Var(term.values(static_cast<Eigen::Index>(c), i));
            sq += e * e;
          }
          break;
        case LossTerm::Kind::periodic:
          for (const auto& comp : term.components) {
            Var e = fields[0].at(comp.field, comp.partial) - fields[1].at(comp.field, comp.partial);
            sq += e * e;
          }
          break;
      }
      if (!std::isfinite(sq.value())) throw NumericalError("non-finite loss contribution");
      total += sq.value();
      if (want_grad) {
        tape_.backward(sq, scale * weight);
        for (int g = 0; g < groups; ++g)
          for (std::size_t k = 0; k < k_count; ++k)
            for (int c = 0; c < channels; ++c) {
              const Var& leaf = leaves[(static_cast<std::size_t>(g) * k_count + k) * static_cast<std::size_t>(channels) +
                                       static_cast<std::size_t>(c)];
              adjoint_(c, static_cast<Eigen::Index>(k) * cols + i + g * n) = tape_.adjoint(leaf);
            }
      }
    } catch (const NumericalError& e) {
      if (e.point()) throw;
      throw NumericalError(std::string("loss term '") + term.name + "': " + e.what(), std::nullopt,
                           static_cast<std::size_t>(i));
    }
  }
  if (want_grad) batch.backward(adjoint_, grad);
  return total * weight;
}

std::vector<Bundle<double>> LossModel::fields(std::span<const double> params, const Eigen::MatrixXd& points,
                                              std::span<const Partial> field_partials) {
  std::vector<Partial> fp(field_partials.begin(), field_partials.end());
  if (fp.empty()) fp.push_back(Partial{});
  autodiff::NetworkJetBatch& batch = batch_for(fp);
  batch.forward(params, points, false);
  const auto& partials = batch.partials();
  std::vector<Bundle<double>> out;
  out.reserve(static_cast<std::size_t>(points.cols()));
  Bundle<double> net;
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    net.clear();
    for (std::size_t k = 0; k < partials.size(); ++k)
      for (int c = 0; c < spec_.output_width; ++c)
        net.set(c, partials[k], batch.output(c, k, static_cast<int>(i)));
    const Eigen::VectorXd point = points.col(i);
    out.push_back(ansatz_->apply(std::span<const double>(point.data(), static_cast<std::size_t>(point.size())), net, fp));
  }
  return out;
}

double physics_loss(LossModel& model, std::span<const double> params, const Eigen::MatrixXd& points,
                    std::span<double> grad, double scale) {
  LossTerm term = residual_term(points);
  return model.evaluate(term, params, grad, scale);
}

double data_loss(LossModel& model, std::span<const double> params, const LossTerm& term, std::span<double> grad,
                 double scale) {
  if (term.kind == LossTerm::Kind::residual) throw ConfigError("data_loss needs a targets or periodic term");
  return model.evaluate(term, params, grad, scale);
}

double composite_loss(double lambda, double L_u, double L_f) {
  if (!(lambda >= 0.0)) throw ConfigError("loss weight lambda must be >= 0");
  return lambda * L_u + L_f;
}

LossBreakdown composite_loss(LossModel& model, std::span<const double> params, std::span<const LossTerm> terms,
                             double lambda, std::vector<double>* grad) {
  if (!(lambda >= 0.0)) throw ConfigError("loss weight lambda must be >= 0");
  std::span<double> g;
  if (grad) {
    grad->assign(model.parameter_count(), 0.0);
    g = *grad;
  }
  LossBreakdown out;
  for (const LossTerm& t : terms) {
    if (t.kind == LossTerm::Kind::residual) {
      out.L_f += model.evaluate(t, params, g, 1.0);
    } else {
      out.L_u += model.evaluate(t, params, g, lambda);
    }
  }
  out.L = composite_loss(lambda, out.L_u, out.L_f);
  return out;
}

Eigen::MatrixXd sample_collocation(double T, std::span<const std::pair<double, double>> spatial_bounds, std::size_t n,
                                   Rng& rng) {
  if (n < 1) throw ConfigError("collocation count must be >= 1");
  if (!(T > 0.0)) throw ConfigError("collocation horizon T must be positive");
  const auto rows = static_cast<Eigen::Index>(spatial_bounds.size() + 1);
  Eigen::MatrixXd pts(rows, static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < pts.cols(); ++j) {
    pts(0, j) = rng.uniform(0.0, T);
    for (Eigen::Index r = 1; r < rows; ++r) {
      const auto& [lo, hi] = spatial_bounds[static_cast<std::size_t>(r - 1)];
      pts(r, j) = rng.uniform(lo, hi);
    }
  }
  return pts;
}

}  // namespace pinnfp::training
