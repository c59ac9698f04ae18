#pragma once

#include <doctest.h>

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace pinnfp::test {

/// Finite-difference agreement: relative 1e-5 or absolute 1e-8 unless overridden.
inline bool fd_close(double got, double want, double rel = 1e-5, double abs = 1e-8) {
  return std::abs(got - want) <= std::max(abs, rel * std::abs(want));
}

/// Central difference of f along coordinate i of x.
inline double central_diff(const std::function<double(std::span<const double>)>& f, std::vector<double> x,
                           std::size_t i, double h = 1e-5) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = f(x);
  x[i] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

}  // namespace pinnfp::test
