#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "pinnfp/autodiff/gradient.hpp"
#include "pinnfp/autodiff/network_jets.hpp"
#include "pinnfp/error.hpp"
#include "pinnfp/network/ansatz.hpp"
#include "pinnfp/network/checkpoint.hpp"
#include "pinnfp/network/spec.hpp"
#include "support.hpp"

using namespace pinnfp;
using namespace pinnfp::autodiff;
using network::Activation;
using network::NetworkSpec;
using test::fd_close;

namespace {

NetworkSpec small_spec(int in, Activation a, std::uint64_t seed = 7) {
  NetworkSpec s;
  s.input_width = in;
  s.hidden_layers = {6, 5};
  s.output_width = 2;
  s.activation = a;
  s.seed = seed;
  return s;
}

// Single output of the batched route for one point.
double batch_value(const NetworkSpec& spec, std::span<const double> params, std::span<const double> point,
                   const Partial& p, int channel = 0) {
  return evaluate_with_input_derivatives(spec, params, point, std::vector<Partial>{p}).at(channel, p);
}

const Activation kAll[] = {Activation::tanh, Activation::swish, Activation::sin};

}  // namespace

TEST_CASE("architecture labels parse both ways") {
  CHECK(network::parse_arch("4x50") == std::vector<int>{50, 50, 50, 50});
  CHECK(network::parse_arch("50-20-10") == std::vector<int>{50, 20, 10});
  CHECK_THROWS_AS(network::parse_arch("0x5"), ConfigError);
  NetworkSpec s;
  CHECK(s.arch_label() == "4x50");
  CHECK(network::parse_activation("swish") == Activation::swish);
  CHECK_THROWS_AS(network::parse_activation("relu"), ConfigError);
}

TEST_CASE("initializer bounds and reproducibility") {
  NetworkSpec s = small_spec(1, Activation::tanh, 11);
  const auto a = network::init_params(s);
  const auto b = network::init_params(s);
  CHECK(a == b);
  s.seed = 12;
  CHECK_FALSE(a == network::init_params(s));
  const network::ParameterLayout layout(s);
  for (std::size_t l = 0; l < layout.layers().size(); ++l) {
    const auto& ll = layout.layer(l);
    const double bound = network::init_bound(s.initializer, ll.fan_in, ll.fan_out);
    CHECK(bound == doctest::Approx(std::sqrt(6.0 / (ll.fan_in + ll.fan_out))));
    for (double w : a.weights(l)) CHECK(std::abs(w) <= bound);
    for (double v : a.biases(l)) CHECK(v == 0.0);
  }
  CHECK(network::init_bound(network::Initializer::he_uniform, 6, 100) == doctest::Approx(1.0));
}

TEST_CASE("activation derivative tables match finite differences") {
  for (Activation a : kAll) {
    for (double s : {-1.7, -0.2, 0.0, 0.9, 2.4}) {
      double d[5], up[5], dn[5];
      network::activation_derivatives(a, s, d);
      network::activation_derivatives(a, s + 1e-5, up);
      network::activation_derivatives(a, s - 1e-5, dn);
      for (int k = 0; k < 4; ++k) CHECK(fd_close(d[k + 1], (up[k] - dn[k]) / 2e-5, 1e-5, 1e-8));
    }
  }
}

TEST_CASE("zero network has zero input derivatives") {
  NetworkSpec s = small_spec(1, Activation::tanh);
  s.output_width = 1;
  const double c = 0.25;
  const auto params = network::constant_network(s, std::span<const double>(&c, 1));
  const double t = 3.0;
  const auto b = evaluate_with_input_derivatives(s, params.values(), std::span<const double>(&t, 1),
                                                 std::vector<Partial>{Partial::along({0, 0})});
  CHECK(b.value() == c);
  CHECK(b.at(0, Partial::along({0})) == 0.0);
  CHECK(b.at(0, Partial::along({0, 0})) == 0.0);
}

TEST_CASE("derivative request beyond input width is refused") {
  const NetworkSpec s = small_spec(1, Activation::tanh);
  const auto params = network::init_params(s);
  const double t = 0.1;
  CHECK_THROWS_AS(evaluate_with_input_derivatives(s, params.values(), std::span<const double>(&t, 1),
                                                  std::vector<Partial>{Partial::along({1})}),
                  ConfigError);
  const double two[2] = {0.1, 0.2};
  CHECK_THROWS_AS(evaluate_with_input_derivatives(s, params.values(), two, std::vector<Partial>{}), ConfigError);
}

TEST_CASE("batched jets agree with scalar jets and finite differences") {
  for (Activation a : kAll) {
    CAPTURE(network::to_string(a));
    const NetworkSpec s = small_spec(2, a);
    const auto params = network::init_params(s);
    const std::vector<double> pt{0.37, -0.81};
    const int axes[2] = {0, 1};
    const auto ref = network_jets<double>(s, params.values(), pt, axes);
    const std::vector<Partial> req{Partial::along({0, 0}), Partial::along({0, 1}), Partial::along({1, 1})};
    const auto got = evaluate_with_input_derivatives(s, params.values(), pt, req);
    for (int c = 0; c < 2; ++c) {
      const auto& j = ref[static_cast<std::size_t>(c)];
      CHECK(got.at(c, Partial{}) == doctest::Approx(j.value()).epsilon(1e-12));
      CHECK(got.at(c, Partial::along({0})) == doctest::Approx(j.d1(0)).epsilon(1e-12));
      CHECK(got.at(c, Partial::along({1})) == doctest::Approx(j.d1(1)).epsilon(1e-12));
      CHECK(got.at(c, Partial::along({0, 0})) == doctest::Approx(j.d2(0, 0)).epsilon(1e-12));
      CHECK(got.at(c, Partial::along({0, 1})) == doctest::Approx(j.d2(0, 1)).epsilon(1e-12));
      CHECK(got.at(c, Partial::along({1, 1})) == doctest::Approx(j.d2(1, 1)).epsilon(1e-12));
    }

    // Every stored partial of order <= 3 against a central difference of the order below.
    const std::vector<Partial> third{Partial::along({0, 0, 0}), Partial::along({0, 0, 1}), Partial::along({0, 1, 1}),
                                     Partial::along({1, 1, 1})};
    const auto full = evaluate_with_input_derivatives(s, params.values(), pt, third);
    for (std::size_t i = 0; i < full.size(); ++i) {
      const auto& e = full.entry(i);
      if (e.partial.is_value()) continue;
      auto axes_of = e.partial.axes();
      const int last = axes_of.back();
      axes_of.pop_back();
      const Partial lower = Partial::along(axes_of);
      const double fd = test::central_diff(
          [&](std::span<const double> p) { return batch_value(s, params.values(), p, lower, e.channel); }, pt,
          static_cast<std::size_t>(last));
      CAPTURE(e.partial.suffix());
      CHECK(fd_close(e.value, fd, 1e-5, 1e-7));
    }
  }
}

TEST_CASE("batched backward matches parameter finite differences") {
  for (Activation a : kAll) {
    CAPTURE(network::to_string(a));
    const NetworkSpec s = small_spec(2, a, 3);
    const auto params = network::init_params(s);
    const PartialSet set{Partial::along({0, 0, 1}), Partial::along({1, 1})};
    Eigen::MatrixXd pts(2, 3);
    pts << 0.1, -0.4, 0.8, 0.5, 0.2, -0.9;
    NetworkJetBatch batch(s, set);
    batch.forward(params.values(), pts);
    Eigen::MatrixXd adj = Eigen::MatrixXd::NullaryExpr(batch.outputs().rows(), batch.outputs().cols(),
                                                       [](Eigen::Index i, Eigen::Index j) {
                                                         return std::sin(1.0 + 0.7 * static_cast<double>(i) +
                                                                         0.3 * static_cast<double>(j));
                                                       });
    std::vector<double> grad(params.size(), 0.0);
    batch.backward(adj, grad);

    auto objective = [&](std::span<const double> p) {
      NetworkJetBatch b(s, set);
      b.forward(p, pts, false);
      return (b.outputs().array() * adj.array()).sum();
    };
    std::vector<double> p0(params.values().begin(), params.values().end());
    for (std::size_t i = 0; i < p0.size(); i += 3) {
      CAPTURE(i);
      CHECK(fd_close(grad[i], test::central_diff(objective, p0, i), 1e-5, 1e-7));
    }
  }
}

TEST_CASE("scalar jet route on the tape gives the same parameter gradient") {
  const NetworkSpec s = small_spec(1, Activation::tanh, 5);
  const auto params = network::init_params(s);
  const double t = 0.6;
  const int axes[1] = {0};
  // Loss y_tt(t) for channel 0.
  const auto vg = value_and_gradient(
      [&](std::span<const Var> p) {
        return network_jets<Var>(s, p, std::span<const double>(&t, 1), axes)[0].d2(0, 0);
      },
      params.values());
  const PartialSet set{Partial::along({0, 0})};
  NetworkJetBatch batch(s, set);
  Eigen::MatrixXd pts(1, 1);
  pts << t;
  batch.forward(params.values(), pts);
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(2, 3);
  adj(0, set.index_of(Partial::along({0, 0}))) = 1.0;
  std::vector<double> grad(params.size(), 0.0);
  batch.backward(adj, grad);
  for (std::size_t i = 0; i < grad.size(); ++i) CHECK(grad[i] == doctest::Approx(vg.gradient[i]).epsilon(1e-10));
}

TEST_CASE("hard initial condition wrapper") {
  NetworkSpec s = small_spec(1, Activation::tanh);
  s.output_width = 1;
  const auto params = network::init_params(s);
  const network::HardIcAnsatz ansatz(0.5);
  const std::vector<Partial> fields{Partial{}, Partial::along({0}), Partial::along({0, 0})};
  for (double t : {0.0, 0.7}) {
    const auto net = evaluate_with_input_derivatives(s, params.values(), std::span<const double>(&t, 1), fields);
    const auto f = ansatz.apply(std::span<const double>(&t, 1), net, fields);
    CHECK(f.value() == doctest::Approx(0.5 + t * net.value()));
    CHECK(f.at(0, fields[1]) == doctest::Approx(net.value() + t * net.at(0, fields[1])));
    CHECK(f.at(0, fields[2]) == doctest::Approx(2 * net.at(0, fields[1]) + t * net.at(0, fields[2])));
  }
}

TEST_CASE("stream-function head is divergence free") {
  NetworkSpec s;
  s.input_width = 3;
  s.hidden_layers = {8, 8};
  s.output_width = 2;
  s.seed = 4;
  const auto params = network::init_params(s);
  const network::StreamFunctionAnsatz ansatz;
  const std::vector<Partial> fields{Partial::along({1}), Partial::along({2}), Partial::along({1, 1})};
  const std::vector<double> pt{0.2, 1.5, -0.3};
  const auto net = evaluate_with_input_derivatives(s, params.values(), pt, ansatz.network_partials(fields));
  const auto f = ansatz.apply(pt, net, fields);
  CHECK(f.at(0, Partial::along({1})) + f.at(1, Partial::along({2})) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  const NetworkSpec s = small_spec(2, Activation::swish, 99);
  const auto params = network::init_params(s);
  const auto dir = std::filesystem::temp_directory_path() / "pinnfp_ckpt_test";
  std::filesystem::create_directories(dir);
  network::save_checkpoint(dir / "theta", s, params, 42);
  const auto back = network::load_checkpoint(dir / "theta.bin");
  CHECK(back.spec == s);
  CHECK(back.params == params);
  CHECK(back.epoch == 42);
  std::filesystem::remove_all(dir);

  const double v[2] = {-0.0, std::numbers::pi};
  const auto bytes = network::encode_f64_le(v);
  CHECK(bytes.size() == 16);
  const auto decoded = network::decode_f64_le(bytes);
  CHECK(std::signbit(decoded[0]));
  CHECK(decoded[1] == std::numbers::pi);
  CHECK_THROWS_AS(network::decode_f64_le("abc"), ParseError);
}

TEST_CASE("single affine layer has u_t = w") {
  NetworkSpec s;
  s.hidden_layers = {};
  CHECK(s.arch_label() == "affine");
  network::ParameterVector p(s);
  p.weights(0)[0] = 1.75;
  p.biases(0)[0] = -0.5;
  const double t = 2.0;
  const auto b = evaluate_with_input_derivatives(s, p.values(), std::span<const double>(&t, 1),
                                                 std::vector<Partial>{Partial::along({0, 0})});
  CHECK(b.value() == 3.0);
  CHECK(b.at(0, Partial::along({0})) == 1.75);
  CHECK(b.at(0, Partial::along({0, 0})) == 0.0);
}
