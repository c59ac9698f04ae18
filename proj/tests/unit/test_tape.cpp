#include <doctest.h>

#include <cmath>
#include <limits>

#include "pinnfp/autodiff/gradient.hpp"
#include "pinnfp/autodiff/jet.hpp"
#include "pinnfp/autodiff/tape.hpp"
#include "pinnfp/error.hpp"
#include "support.hpp"

using namespace pinnfp::autodiff;
using pinnfp::test::central_diff;
using pinnfp::test::fd_close;

namespace {

template <typename T>
T sample(std::span<const T> v) {
  using std::cos;
  using std::exp;
  using std::sin;
  using std::tanh;
  using std::pow;
  const T& a = v[0];
  const T& b = v[1];
  const T& c = v[2];
  return a * b - sin(c) / (b + T(3.0)) + tanh(a * c) + exp(T(0.5) * b) * cos(a) + pow(b * b + T(1.0), 1.5) +
         T(2.0) / (c + T(4.0)) - sigmoid(a - c);
}

}  // namespace

TEST_CASE("reverse sweep matches finite differences") {
  const std::vector<double> x{0.3, -0.7, 1.1};
  const auto vg = value_and_gradient([](std::span<const Var> v) { return sample<Var>(v); }, x);
  CHECK(vg.value == doctest::Approx(sample<double>(x)).epsilon(1e-14));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fd = central_diff([](std::span<const double> v) { return sample<double>(v); }, x, i);
    CHECK(fd_close(vg.gradient[i], fd));
  }
}

TEST_CASE("tape replays with new leaf values") {
  Tape tape;
  Var a = tape.variable(1.0);
  Var b = tape.variable(2.0);
  Var y = a * a * b + sin(b);
  tape.set_leaves(std::vector<double>{3.0, 0.5});
  const double v = tape.replay(y);
  CHECK(v == doctest::Approx(9.0 * 0.5 + std::sin(0.5)));
  tape.backward(y);
  CHECK(tape.adjoint(a) == doctest::Approx(2 * 3.0 * 0.5));
  CHECK(tape.adjoint(b) == doctest::Approx(9.0 + std::cos(0.5)));
}

TEST_CASE("constants stay off the tape") {
  Var c = Var(2.0) * Var(3.0);
  CHECK(c.value() == 6.0);
  Tape t1, t2;
  Var a = t1.variable(1.0);
  Var b = t2.variable(1.0);
  CHECK_THROWS_AS(a + b, pinnfp::ConfigError);
}

TEST_CASE("non-finite intermediates raise") {
  CHECK_THROWS_AS(value_and_gradient([](std::span<const Var> v) { return v[0] / (v[0] - v[0]); },
                                     std::vector<double>{1.0}),
                  pinnfp::NumericalError);
}

TEST_CASE("second-order jets of a composite") {
  // f(x, y) = tanh(x y) + sin(x) / y
  const double x = 0.4, y = 1.3;
  auto jx = Jet<double>::seeded(x, 2, 0);
  auto jy = Jet<double>::seeded(y, 2, 1);
  auto f = tanh(jx * jy) + sin(jx) / jy;
  const double th = std::tanh(x * y);
  const double sech2 = 1 - th * th;
  CHECK(f.value() == doctest::Approx(th + std::sin(x) / y));
  CHECK(f.d1(0) == doctest::Approx(sech2 * y + std::cos(x) / y));
  CHECK(f.d1(1) == doctest::Approx(sech2 * x - std::sin(x) / (y * y)));
  CHECK(f.d2(0, 0) == doctest::Approx(-2 * th * sech2 * y * y - std::sin(x) / y));
  CHECK(f.d2(0, 1) == doctest::Approx(sech2 - 2 * th * sech2 * x * y - std::cos(x) / (y * y)));
  CHECK(f.d2(1, 1) == doctest::Approx(-2 * th * sech2 * x * x + 2 * std::sin(x) / (y * y * y)));
}
