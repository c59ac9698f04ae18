#include "pinnfp/landscape/landscape.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "pinnfp/error.hpp"
#include "pinnfp/io/csv.hpp"
#include "pinnfp/parallel.hpp"
#include "pinnfp/random.hpp"

namespace pinnfp::landscape {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> diff(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

/// Range [lo, hi] stretched so 0 and q are both multiples of the node spacing.
std::pair<double, double> snap_axis(double lo, double hi, int n, double q) {
  if (n < 3 || !(hi > lo)) return {lo, hi};
  const double h_min = (hi - lo) / (n - 2);
  double h = h_min;
  if (q != 0.0) {
    const double m = std::floor(std::abs(q) / h_min);
    if (m >= 1.0) h = std::abs(q) / m;
  }
  const double start = std::floor(lo / h) * h;
  return {start, start + (n - 1) * h};
}

}  // namespace

Directions build_directions(std::span<const double> theta0, std::span<const double> theta_mid,
                            std::span<const double> theta_final, double tolerance) {
  if (theta0.size() != theta_mid.size() || theta0.size() != theta_final.size())
    throw ConfigError("checkpoints have different parameter counts");
  if (theta0.empty()) throw ConfigError("empty checkpoints");
  Directions dirs;
  dirs.d1 = diff(theta_mid, theta0);
  dirs.mid_norm = norm(dirs.d1);
  if (!(dirs.mid_norm > 0.0)) throw DegenerateDirectionError("intermediate checkpoint equals the initial one");
  for (double& v : dirs.d1) v /= dirs.mid_norm;

  dirs.d2 = diff(theta_final, theta0);
  dirs.final_norm = norm(dirs.d2);
  if (!(dirs.final_norm > 0.0)) throw DegenerateDirectionError("final checkpoint equals the initial one");
  for (int pass = 0; pass < 2; ++pass) axpy(-dot(dirs.d1, dirs.d2), dirs.d1, dirs.d2);
  dirs.final_residual_norm = norm(dirs.d2);
  if (!(dirs.final_residual_norm > tolerance * dirs.final_norm))
    throw DegenerateDirectionError("final displacement is collinear with the intermediate one");
  for (double& v : dirs.d2) v /= dirs.final_residual_norm;
  return dirs;
}

Coordinates project(std::span<const double> theta, std::span<const double> theta0, const Directions& dirs) {
  if (theta.size() != theta0.size() || theta.size() != dirs.d1.size())
    throw ConfigError("parameter count does not match the landscape directions");
  const auto delta = diff(theta, theta0);
  return {dot(delta, dirs.d1), dot(delta, dirs.d2)};
}

Extents default_extents(std::span<const Coordinates> points, int n1, int n2, double margin,
                        std::optional<Coordinates> lattice_point) {
  if (points.empty()) throw ConfigError("no points to frame");
  if (n1 < 1 || n2 < 1) throw ConfigError("grid resolution must be at least 1 x 1");
  double lo1 = points[0].s1, hi1 = lo1, lo2 = points[0].s2, hi2 = lo2;
  for (const auto& p : points) {
    lo1 = std::min(lo1, p.s1);
    hi1 = std::max(hi1, p.s1);
    lo2 = std::min(lo2, p.s2);
    hi2 = std::max(hi2, p.s2);
  }
  // A flat axis borrows the other axis' width so the frame never collapses.
  double w1 = hi1 - lo1, w2 = hi2 - lo2;
  if (w1 == 0.0) w1 = w2 > 0.0 ? w2 : 1.0;
  if (w2 == 0.0) w2 = w1;
  lo1 -= margin * w1;
  hi1 += margin * w1;
  lo2 -= margin * w2;
  hi2 += margin * w2;
  if (lattice_point) {
    std::tie(lo1, hi1) = snap_axis(lo1, hi1, n1, lattice_point->s1);
    std::tie(lo2, hi2) = snap_axis(lo2, hi2, n2, lattice_point->s2);
  }
  return {lo1, hi1, lo2, hi2};
}

double LandscapeGrid::s1(int i) const {
  if (n1 == 1) return 0.5 * (extents.a1 + extents.b1);
  return extents.a1 + (extents.b1 - extents.a1) * static_cast<double>(i) / static_cast<double>(n1 - 1);
}

double LandscapeGrid::s2(int j) const {
  if (n2 == 1) return 0.5 * (extents.a2 + extents.b2);
  return extents.a2 + (extents.b2 - extents.a2) * static_cast<double>(j) / static_cast<double>(n2 - 1);
}

std::pair<int, int> LandscapeGrid::nearest(Coordinates c) const {
  auto pick = [](double v, double a, double b, int n) {
    if (n == 1 || b == a) return 0;
    const double k = std::round((v - a) / (b - a) * (n - 1));
    return static_cast<int>(std::clamp(k, 0.0, static_cast<double>(n - 1)));
  };
  return {pick(c.s1, extents.a1, extents.b1, n1), pick(c.s2, extents.a2, extents.b2, n2)};
}

std::pair<int, int> LandscapeGrid::argmin() const {
  const auto it = std::min_element(raw.begin(), raw.end());
  const auto k = static_cast<int>(it - raw.begin());
  return {k / n2, k % n2};
}

Eigen::MatrixXd landscape_collocation(const training::Problem& problem, double T, std::size_t n_col,
                                      std::uint64_t seed) {
  if (!(T > 0.0)) throw ConfigError("landscape horizon must be positive");
  if (n_col == 0) throw ConfigError("landscape needs at least one collocation point");
  Rng rng = Rng::stream(seed ^ Rng::mix(std::bit_cast<std::uint64_t>(T)), 3);
  return training::sample_collocation(T, problem.system->descriptor().spatial_bounds, n_col, rng);
}

namespace {

double loss_at(training::LossModel& model, std::span<const double> anchor, const Directions& dirs,
               const Eigen::MatrixXd& points, Coordinates c, std::vector<double>& scratch) {
  scratch.assign(anchor.begin(), anchor.end());
  axpy(c.s1, dirs.d1, scratch);
  axpy(c.s2, dirs.d2, scratch);
  try {
    const double v = training::physics_loss(model, scratch, points);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

LandscapeGrid evaluate_grid(const training::Problem& problem, std::span<const double> anchor, const Directions& dirs,
                            const GridSettings& settings) {
  if (settings.n1 < 1 || settings.n2 < 1) throw ConfigError("grid resolution must be at least 1 x 1");
  if (anchor.size() != dirs.d1.size() || anchor.size() != dirs.d2.size())
    throw ConfigError("anchor and directions have different parameter counts");
  LandscapeGrid grid;
  grid.anchor.assign(anchor.begin(), anchor.end());
  grid.directions = dirs;
  grid.extents = settings.extents;
  grid.n1 = settings.n1;
  grid.n2 = settings.n2;
  grid.T = settings.T;
  grid.n_col = settings.n_col;
  grid.seed = settings.seed;
  const Eigen::MatrixXd points = landscape_collocation(problem, settings.T, settings.n_col, settings.seed);

  grid.values.assign(static_cast<std::size_t>(grid.n1) * static_cast<std::size_t>(grid.n2), 0.0);
  parallel_for(static_cast<std::size_t>(grid.n1), settings.threads, [&](std::size_t i) {
    training::LossModel model = problem.loss_model();
    std::vector<double> scratch;
    for (int j = 0; j < grid.n2; ++j)
      grid.values[i * static_cast<std::size_t>(grid.n2) + static_cast<std::size_t>(j)] =
          loss_at(model, anchor, dirs, points, {grid.s1(static_cast<int>(i)), grid.s2(j)}, scratch);
  });
  grid.raw = grid.values;
  return grid;
}

double evaluate_point(const training::Problem& problem, const LandscapeGrid& grid, Coordinates c) {
  const Eigen::MatrixXd points = landscape_collocation(problem, grid.T, grid.n_col, grid.seed);
  training::LossModel model = problem.loss_model();
  std::vector<double> scratch;
  return loss_at(model, grid.anchor, grid.directions, points, c, scratch);
}

LandscapeGrid truncate(const LandscapeGrid& grid, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("truncation threshold must be positive");
  LandscapeGrid out = grid;
  out.threshold = threshold;
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = std::min(out.raw[k], threshold);
  return out;
}

std::string_view to_string(LocalMinKind k) {
  return k == LocalMinKind::strict_local_min ? "strict-local-min" : "saddle-or-slope";
}

LocalMinKind local_min_test(const LandscapeGrid& grid, int i, int j) {
  if (i <= 0 || j <= 0 || i >= grid.n1 - 1 || j >= grid.n2 - 1)
    throw DomainError("cell (" + std::to_string(i) + ", " + std::to_string(j) + ") is not interior to the grid");
  const double v = grid.raw_at(i, j);
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj) {
      if (di == 0 && dj == 0) continue;
      if (!(v < grid.raw_at(i + di, j + dj))) return LocalMinKind::saddle_or_slope;
    }
  return LocalMinKind::strict_local_min;
}

std::string grid_csv(const LandscapeGrid& grid) {
  std::string out = "s1,s2,Lf\n";
  for (int i = 0; i < grid.n1; ++i)
    for (int j = 0; j < grid.n2; ++j) {
      const double v = grid.at(i, j);
      out += io::csv_row({io::format_double(grid.s1(i)), io::format_double(grid.s2(j)),
                          std::isinf(v) ? std::string("inf") : io::format_double(v)});
    }
  return out;
}

nlohmann::json grid_metadata(const LandscapeGrid& grid) {
  nlohmann::json j{{"T", grid.T},
                   {"seed", grid.seed},
                   {"n_col", grid.n_col},
                   {"resolution", {grid.n1, grid.n2}},
                   {"extents", {{"s1", {grid.extents.a1, grid.extents.b1}}, {"s2", {grid.extents.a2, grid.extents.b2}}}},
                   {"direction_norms",
                    {{"mid", grid.directions.mid_norm},
                     {"final", grid.directions.final_norm},
                     {"final_orthogonal", grid.directions.final_residual_norm}}},
                   {"threshold", grid.threshold ? nlohmann::json(*grid.threshold) : nlohmann::json(nullptr)}};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : grid.raw)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  j["raw_min"] = std::isfinite(lo) ? nlohmann::json(lo) : nlohmann::json(nullptr);
  j["raw_max"] = std::isfinite(hi) ? nlohmann::json(hi) : nlohmann::json(nullptr);
  return j;
}

}  // namespace pinnfp::landscape
