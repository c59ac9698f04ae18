#pragma once

#include <Eigen/Core>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pinnfp/autodiff/network_jets.hpp"
#include "pinnfp/autodiff/tape.hpp"
#include "pinnfp/network/ansatz.hpp"
#include "pinnfp/network/spec.hpp"
#include "pinnfp/random.hpp"
#include "pinnfp/systems/systems.hpp"

namespace pinnfp::training {

using autodiff::Partial;

/// One physical field partial, e.g. (field 0, u_t).
struct FieldComponent {
  int field = 0;
  Partial partial;
  bool operator==(const FieldComponent&) const = default;
};

/// A mean-squared term of the loss.
///
/// residual: mean over points of the summed squared residual equations.
/// targets:  mean over points of sum_c (field_c(point) - values(c, point))^2.
/// periodic: mean over pairs of sum_c (field_c(points_i) - field_c(partners_i))^2.
struct LossTerm {
  enum class Kind { residual, targets, periodic };
  Kind kind = Kind::residual;
  std::string name;
  Eigen::MatrixXd points;    // input_width x N
  Eigen::MatrixXd partners;  // periodic only, same shape as points
  std::vector<FieldComponent> components;
  Eigen::MatrixXd values;    // targets only, components x N

  std::size_t count() const { return static_cast<std::size_t>(points.cols()); }
};

LossTerm residual_term(Eigen::MatrixXd points);

/// Evaluates loss terms for one network and system. Keeps scratch buffers, so an instance must
/// not be shared between threads; make one per worker.
class LossModel {
 public:
  LossModel(std::shared_ptr<const systems::SystemModel> system, std::shared_ptr<const network::Ansatz> ansatz,
            network::NetworkSpec spec);

  const systems::SystemModel& system() const { return *system_; }
  const network::Ansatz& ansatz() const { return *ansatz_; }
  const network::NetworkSpec& spec() const { return spec_; }
  std::size_t parameter_count() const { return layout_.size(); }

  /// Value of the term. When `grad` is non-empty, adds scale * d(term)/d(params) to it.
  /// Throws NumericalError (with the point index) on a non-finite residual.
  double evaluate(const LossTerm& term, std::span<const double> params, std::span<double> grad = {},
                  double scale = 1.0);

  /// Fields (after the ansatz) with the requested partials at each point; channel-major rows.
  std::vector<autodiff::Bundle<double>> fields(std::span<const double> params, const Eigen::MatrixXd& points,
                                               std::span<const Partial> field_partials);

 private:
  autodiff::NetworkJetBatch& batch_for(const std::vector<Partial>& field_partials);

  std::shared_ptr<const systems::SystemModel> system_;
  std::shared_ptr<const network::Ansatz> ansatz_;
  network::NetworkSpec spec_;
  network::ParameterLayout layout_;
  std::map<std::vector<Partial>, std::unique_ptr<autodiff::NetworkJetBatch>> batches_;
  autodiff::Tape tape_;
  Eigen::MatrixXd adjoint_;
};

/// L_f = (1/N) sum_i sum_e f_e(point_i)^2.
double physics_loss(LossModel& model, std::span<const double> params, const Eigen::MatrixXd& points,
                    std::span<double> grad = {}, double scale = 1.0);

/// Mean squared mismatch against labels (a `targets` or `periodic` term).
double data_loss(LossModel& model, std::span<const double> params, const LossTerm& term, std::span<double> grad = {},
                 double scale = 1.0);

struct LossBreakdown {
  double L_f = 0.0;
  double L_u = 0.0;
  double L = 0.0;
};

/// L = lambda * L_u + L_f.
double composite_loss(double lambda, double L_u, double L_f);

/// L_f from the residual terms, L_u summed over constraint terms, L = lambda L_u + L_f.
/// Fills grad (resized to the parameter count and zeroed first) when `grad` is non-null.
LossBreakdown composite_loss(LossModel& model, std::span<const double> params, std::span<const LossTerm> terms,
                             double lambda, std::vector<double>* grad = nullptr);

/// n points i.i.d. uniform on [0, T] x bounds; rows are (t, x, ...).
Eigen::MatrixXd sample_collocation(double T, std::span<const std::pair<double, double>> spatial_bounds, std::size_t n,
                                   Rng& rng);

}  // namespace pinnfp::training
