#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinnfp/training/train.hpp"

namespace pinnfp::landscape {

/// Orthonormal plot directions through three training checkpoints.
struct Directions {
  std::vector<double> d1;
  std::vector<double> d2;
  double mid_norm = 0.0;    // ||theta_mid - theta_0||
  double final_norm = 0.0;  // ||theta_final - theta_0||
  double final_residual_norm = 0.0;  // ||theta_final - theta_0|| after removing its d1 part
};

/// d1 = normalize(mid - theta0); d2 = normalize((final - theta0) minus its d1 projection), with a
/// second projection pass for orthogonality. Throws DegenerateDirectionError when a difference is
/// zero or the two are collinear (relative residual below `tolerance`), ConfigError on length mismatch.
Directions build_directions(std::span<const double> theta0, std::span<const double> theta_mid,
                            std::span<const double> theta_final, double tolerance = 1e-10);

struct Coordinates {
  double s1 = 0.0;
  double s2 = 0.0;
};

/// Coordinates of theta in the plane theta0 + s1 d1 + s2 d2 (orthogonal projection).
Coordinates project(std::span<const double> theta, std::span<const double> theta0, const Directions& dirs);

struct Extents {
  double a1 = 0.0, b1 = 0.0;
  double a2 = 0.0, b2 = 0.0;
};

/// Bounding box of the points widened by `margin` of its size on each side. When
/// `lattice_point` is given and the resolution allows it, the box is stretched slightly so the
/// origin and that point both land on grid nodes.
Extents default_extents(std::span<const Coordinates> points, int n1, int n2, double margin = 0.25,
                        std::optional<Coordinates> lattice_point = std::nullopt);

struct LandscapeGrid {
  std::vector<double> anchor;
  Directions directions;
  Extents extents;
  int n1 = 0;
  int n2 = 0;
  double T = 0.0;
  std::size_t n_col = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;  // n1 x n2, row-major in s1; +inf where the loss was not finite
  std::vector<double> raw;     // values before truncation
  std::optional<double> threshold;

  double s1(int i) const;
  double s2(int j) const;
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) + j]; }
  double raw_at(int i, int j) const { return raw[static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) + j]; }
  /// Node closest to the given coordinates.
  std::pair<int, int> nearest(Coordinates c) const;
  /// Node holding the smallest value (first in row-major order on ties).
  std::pair<int, int> argmin() const;
};

struct GridSettings {
  Extents extents;
  int n1 = 41;
  int n2 = 41;
  double T = 0.0;
  std::size_t n_col = 1024;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Collocation sample for a horizon: n_col points drawn from [0, T] x spatial bounds with a
/// stream fixed by (seed, T). The same sample is used for every cell of a grid.
Eigen::MatrixXd landscape_collocation(const training::Problem& problem, double T, std::size_t n_col,
                                      std::uint64_t seed);

/// Physics loss at anchor + s1 d1 + s2 d2 over the horizon's collocation sample.
LandscapeGrid evaluate_grid(const training::Problem& problem, std::span<const double> anchor, const Directions& dirs,
                            const GridSettings& settings);

/// Physics loss at arbitrary plane coordinates with the grid's collocation sample.
double evaluate_point(const training::Problem& problem, const LandscapeGrid& grid, Coordinates c);

/// Clamps values above threshold; the unclamped values stay in `raw`.
LandscapeGrid truncate(const LandscapeGrid& grid, double threshold);

enum class LocalMinKind { strict_local_min, saddle_or_slope };
std::string_view to_string(LocalMinKind k);

/// Strict local minimum iff the value is below all 8 neighbours (raw values). Boundary cells
/// raise DomainError.
LocalMinKind local_min_test(const LandscapeGrid& grid, int i, int j);

/// `s1,s2,Lf` with +inf written as "inf".
std::string grid_csv(const LandscapeGrid& grid);

/// Direction norms, T, seed, threshold, extents and resolution. Callers add marker coordinates.
nlohmann::json grid_metadata(const LandscapeGrid& grid);

}  // namespace pinnfp::landscape
