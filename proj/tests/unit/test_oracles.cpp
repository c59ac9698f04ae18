#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "pinnfp/error.hpp"
#include "pinnfp/oracles/oracles.hpp"
#include "pinnfp/random.hpp"

using namespace pinnfp;
using namespace pinnfp::oracles;

TEST_CASE("toy closed form values") {
  CHECK(toy_analytic(0.0, 3.0) == 0.0);
  CHECK(toy_analytic(1.0, 2.0) == 1.0);
  CHECK(toy_analytic(-1.0, 2.0) == -1.0);
  const double half = 1.0 / std::sqrt(1.0 + 3.0 * std::exp(-2.0));  // 0.843347
  CHECK(toy_analytic(0.5, 1.0) == doctest::Approx(half).epsilon(1e-14));
  CHECK(toy_analytic(-0.5, 1.0) == doctest::Approx(-half).epsilon(1e-14));
  CHECK_THROWS_AS(toy_analytic(1.5, 1.0), DomainError);
  CHECK_THROWS_AS(toy_analytic(0.5, -1.0), DomainError);
}

TEST_CASE("pendulum energy values") {
  CHECK(pendulum_energy(0, 0) == doctest::Approx(-9.81));
  CHECK(pendulum_energy(std::numbers::pi, 0) == doctest::Approx(9.81));
  CHECK(std::abs(pendulum_energy(std::numbers::pi / 2, 0)) < 1e-12);
}

TEST_CASE("RK4 keeps a constant state and lands on T") {
  const double c[1] = {3.25};
  const auto ref = rk4_integrate([](double, std::span<const double>, std::span<double> dy) { dy[0] = 0; }, c, 1.05, 0.1);
  CHECK(ref.times.back() == 1.05);
  CHECK(ref.times.size() == 12);
  CHECK(ref.times[ref.times.size() - 2] == doctest::Approx(1.0));
  for (std::size_t i = 0; i < ref.time_count(); ++i) CHECK(ref.at(i) == 3.25);
  ref.validate();
  CHECK_THROWS_AS(rk4_integrate(toy_rhs(), c, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(rk4_integrate(toy_rhs(), c, -1.0, 0.1), ConfigError);
}

TEST_CASE("RK4 reports divergence with the step index") {
  const double y0[1] = {1.0};
  try {
    rk4_integrate([](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0] * 1e300; }, y0, 1.0,
                  0.1);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() >= 1);
  }
}

TEST_CASE("RK4 matches the toy closed form") {
  const double y0[1] = {0.3};
  const auto ref = rk4_integrate(toy_rhs(), y0, 5.0, 1e-3);
  for (std::size_t i = 0; i < ref.time_count(); i += 250)
    CHECK(ref.at(i) == doctest::Approx(toy_analytic(0.3, ref.times[i])).epsilon(1e-11));
}

TEST_CASE("piecewise-linear interpolation") {
  ReferenceSolution r;
  r.times = {0, 1, 2};
  r.components = {"y"};
  r.values = {0, 10, 30};
  CHECK(r.interpolate(0.5) == 5.0);
  CHECK(r.interpolate(1.5) == 20.0);
  CHECK(r.interpolate(-1) == 0.0);
  CHECK(r.interpolate(9) == 30.0);
  r.times = {0, 0, 1};
  CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("Allen-Cahn reference basics") {
  AllenCahnOptions opt;
  opt.nx = 128;
  opt.T = 0.05;
  opt.dt = 1e-3;
  opt.snapshot_dt = 0.01;
  const auto ref = allen_cahn_reference(opt);
  ref.validate();
  REQUIRE(ref.time_count() == 6);
  REQUIRE(ref.space.size() == 129);
  CHECK(ref.times.back() == 0.05);
  for (std::size_t j = 0; j < ref.space.size(); ++j) {
    const double x = ref.space[j];
    if (j + 1 < ref.space.size()) CHECK(ref.at(0, j, 0) == doctest::Approx(x * x * std::cos(std::numbers::pi * x)));
  }
  for (std::size_t i = 0; i < ref.time_count(); ++i) CHECK(ref.at(i, 0, 0) == ref.at(i, 128, 0));
  CHECK_THROWS_AS(allen_cahn_reference(64, 1e-3, 0.1), ConfigError);
  opt.dt = 1.0;
  CHECK_THROWS_AS(allen_cahn_reference(opt), ConfigError);
  opt.laplacian = Laplacian::central2;
  opt.nx = 128;
  // central bound 0.5 dx^2 / gamma1 = 1.2207 for nx = 128; the spectral one is tighter
  opt.gamma2 = 0.0;
  opt.dt = 1.2;
  opt.T = 1.2;
  opt.snapshot_dt = 1.2;
  CHECK_NOTHROW(allen_cahn_reference(opt));
  opt.laplacian = Laplacian::spectral;
  CHECK_THROWS_AS(allen_cahn_reference(opt), ConfigError);
  opt.laplacian = Laplacian::central2;
  opt.dt = 1.23;
  CHECK_THROWS_AS(allen_cahn_reference(opt), ConfigError);
}

TEST_CASE("reference CSV layout") {
  ReferenceSolution r;
  r.times = {0, 0.5};
  r.components = {"y", "ydot"};
  r.values = {1, 0, 0.25, -1};
  CHECK(reference_csv(r) == "t,y,ydot\n0,1,0\n0.5,0.25,-1\n");
}

TEST_CASE("field snapshots") {
  CHECK(parse_field_snapshots("t,x,y,u,v,p\n").empty());
  const auto one = parse_field_snapshots("t,x,y,u,v,p\n0,0,0,1,0,0\n");
  REQUIRE(one.size() == 1);
  CHECK(one[0].u == 1.0);
  CHECK(one[0].x == 0.0);
  try {
    parse_field_snapshots("t,x,y,u,v,p\n0,0,0,1,0,0\n0,0,zz,1,0,0\n");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_field_snapshots("t,x,y,u,v,p\n0,0,0\n"), ParseError);
  CHECK_THROWS_AS(parse_field_snapshots("a,b\n"), ParseError);

  Rng rng(5);
  FieldDataset data(50);
  for (auto& r : data) r = {rng.uniform(0, 20), rng.uniform(1, 8), rng.uniform(-2, 2), rng.uniform(-1, 1),
                            rng.uniform(-1e-3, 1e-3), rng.uniform(-1e10, 1e10)};
  const auto path = std::filesystem::temp_directory_path() / "pinnfp_fields.csv";
  {
    std::ofstream out(path);
    out << field_snapshots_csv(data);
  }
  CHECK(load_field_snapshots(path) == data);
  std::filesystem::remove(path);
}
