#include "pinnfp/oracles/oracles.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include "pinnfp/error.hpp"
#include "pinnfp/io/csv.hpp"

namespace pinnfp::oracles {

namespace {

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

// Bracketing index i with grid[i] <= x <= grid[i+1] and the weight of grid[i+1].
std::pair<std::size_t, double> bracket(const std::vector<double>& grid, double x) {
  if (grid.size() == 1 || x <= grid.front()) return {0, 0.0};
  if (x >= grid.back()) return {grid.size() - 2, 1.0};
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const auto i = static_cast<std::size_t>(it - grid.begin()) - 1;
  return {i, (x - grid[i]) / (grid[i + 1] - grid[i])};
}

}  // namespace

void ReferenceSolution::validate() const {
  if (times.empty()) throw ConfigError("reference solution has no time nodes");
  if (!strictly_increasing(times)) throw ConfigError("reference time grid is not strictly increasing");
  if (!strictly_increasing(space)) throw ConfigError("reference space grid is not strictly increasing");
  if (components.empty()) throw ConfigError("reference solution has no components");
  if (values.size() != times.size() * space_count() * components.size())
    throw ConfigError("reference value array does not match its grid shape");
}

double ReferenceSolution::interpolate(double t, std::size_t c) const {
  const auto [i, w] = bracket(times, t);
  if (w == 0.0) return at(i, c);
  return (1.0 - w) * at(i, c) + w * at(i + 1, c);
}

double ReferenceSolution::interpolate_field(double t, double x, std::size_t c) const {
  if (space.empty()) return interpolate(t, c);
  const auto [i, wt] = bracket(times, t);
  const auto [j, wx] = bracket(space, x);
  auto row = [&](std::size_t ti) {
    if (space.size() == 1) return at(ti, 0, c);
    return (1.0 - wx) * at(ti, j, c) + wx * at(ti, j + 1, c);
  };
  if (times.size() == 1) return row(0);
  return (1.0 - wt) * row(i) + wt * row(i + 1);
}

ReferenceSolution rk4_integrate(const OdeRhs& rhs, std::span<const double> y0, double T, double dt,
                                std::vector<std::string> components) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("RK4 step dt must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("RK4 horizon T must be positive");
  const std::size_t dim = y0.size();
  if (dim == 0) throw ConfigError("RK4 needs a non-empty state");
  if (components.empty())
    for (std::size_t i = 0; i < dim; ++i) components.push_back("y" + std::to_string(i));
  if (components.size() != dim) throw ConfigError("component names do not match state dimension");

  // Whole steps, plus one shortened step unless T is (numerically) a multiple of dt.
  const double ratio = T / dt;
  std::size_t full = static_cast<std::size_t>(std::floor(ratio));
  if (std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio)) full = static_cast<std::size_t>(std::llround(ratio));
  const bool partial = T - static_cast<double>(full) * dt > 1e-12 * T;
  const std::size_t steps = full + (partial ? 1 : 0);

  ReferenceSolution out;
  out.components = std::move(components);
  out.times.reserve(steps + 1);
  out.values.reserve((steps + 1) * dim);
  out.metadata = {{"method", "rk4"}, {"dt", dt}, {"T", T}};

  std::vector<double> y(y0.begin(), y0.end()), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  out.times.push_back(0.0);
  out.values.insert(out.values.end(), y.begin(), y.end());
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    const double t_next = s + 1 == steps ? T : static_cast<double>(s + 1) * dt;
    const double h = t_next - t;
    rhs(t, y, k1);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(t + h, tmp, k4);
    for (std::size_t i = 0; i < dim; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(y[i])) throw DivergenceError("RK4 state became non-finite", s + 1);
    }
    out.times.push_back(t_next);
    out.values.insert(out.values.end(), y.begin(), y.end());
  }
  return out;
}

double toy_analytic(double y0, double t) {
  if (!(std::abs(y0) <= 1.0)) throw DomainError("toy closed form needs |y0| <= 1");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("toy closed form needs finite t >= 0");
  if (y0 == 0.0) return 0.0;
  const double c = 1.0 / (y0 * y0) - 1.0;
  return std::copysign(1.0 / std::sqrt(1.0 + c * std::exp(-2.0 * t)), y0);
}

double pendulum_energy(double y, double ydot, double g, double l) { return 0.5 * ydot * ydot - (g / l) * std::cos(y); }

OdeRhs pendulum_rhs(double g, double l) {
  const double w2 = g / l;
  return [w2](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -w2 * std::sin(y[0]);
  };
}

OdeRhs toy_rhs() {
  return [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * (1.0 - y[0] * y[0]); };
}

ReferenceSolution pendulum_reference(double y0, double ydot0, double T, double dt, double g, double l) {
  const double init[2] = {y0, ydot0};
  auto ref = rk4_integrate(pendulum_rhs(g, l), init, T, dt, {"y", "ydot"});
  ref.metadata["system"] = "pendulum";
  ref.metadata["g"] = g;
  ref.metadata["l"] = l;
  return ref;
}

ReferenceSolution toy_reference(double y0, double T, std::size_t n) {
  if (n < 2) throw ConfigError("toy reference needs at least two samples");
  if (!(T > 0.0)) throw ConfigError("toy reference horizon must be positive");
  ReferenceSolution ref;
  ref.components = {"y"};
  ref.metadata = {{"method", "closed-form"}, {"system", "toy"}, {"T", T}};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(n - 1);
    ref.times.push_back(t);
    ref.values.push_back(toy_analytic(y0, t));
  }
  return ref;
}

Laplacian parse_laplacian(std::string_view name) {
  if (name == "spectral" || name == "fourier") return Laplacian::spectral;
  if (name == "central2" || name == "central") return Laplacian::central2;
  throw ConfigError("unknown Laplacian '" + std::string(name) + "' (expected spectral or central2)");
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Periodic second derivative on nx nodes of spacing dx.
class PeriodicLaplacian {
 public:
  PeriodicLaplacian(int nx, double length, Laplacian kind) : nx_(nx), dx_(length / nx), kind_(kind) {
    if (kind_ != Laplacian::spectral) return;
    const int nk = nx / 2 + 1;
    real_ = fftw_alloc_real(static_cast<std::size_t>(nx));
    spec_ = fftw_alloc_complex(static_cast<std::size_t>(nk));
    {
      std::lock_guard lock(fftw_planner_mutex());
      forward_ = fftw_plan_dft_r2c_1d(nx, real_, spec_, FFTW_ESTIMATE);
      backward_ = fftw_plan_dft_c2r_1d(nx, spec_, real_, FFTW_ESTIMATE);
    }
    symbol_.resize(static_cast<std::size_t>(nk));
    for (int m = 0; m < nk; ++m) {
      const double k = 2.0 * std::numbers::pi * m / length;
      symbol_[static_cast<std::size_t>(m)] = -k * k / nx;
    }
  }
  ~PeriodicLaplacian() {
    if (kind_ != Laplacian::spectral) return;
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(forward_);
      fftw_destroy_plan(backward_);
    }
    fftw_free(real_);
    fftw_free(spec_);
  }
  PeriodicLaplacian(const PeriodicLaplacian&) = delete;
  PeriodicLaplacian& operator=(const PeriodicLaplacian&) = delete;

  // Largest magnitude of the discrete operator's spectrum.
  double spectral_radius() const {
    return kind_ == Laplacian::spectral ? std::pow(std::numbers::pi / dx_, 2) : 4.0 / (dx_ * dx_);
  }

  void apply(const std::vector<double>& u, std::vector<double>& out) {
    const auto n = static_cast<std::size_t>(nx_);
    if (kind_ == Laplacian::central2) {
      const double inv = 1.0 / (dx_ * dx_);
      for (std::size_t j = 0; j < n; ++j) {
        const double l = u[(j + n - 1) % n], r = u[(j + 1) % n];
        out[j] = (l - 2.0 * u[j] + r) * inv;
      }
      return;
    }
    std::copy(u.begin(), u.end(), real_);
    fftw_execute(forward_);
    for (std::size_t m = 0; m < symbol_.size(); ++m) {
      spec_[m][0] *= symbol_[m];
      spec_[m][1] *= symbol_[m];
    }
    fftw_execute(backward_);
    std::copy(real_, real_ + n, out.begin());
  }

 private:
  int nx_;
  double dx_;
  Laplacian kind_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::vector<double> symbol_;
};

}  // namespace

ReferenceSolution allen_cahn_reference(const AllenCahnOptions& opt) {
  if (opt.nx < 128) throw ConfigError("Allen-Cahn reference needs nx >= 128");
  if (!(opt.dt > 0.0) || !(opt.T > 0.0) || !(opt.snapshot_dt > 0.0))
    throw ConfigError("Allen-Cahn reference needs positive dt, T and snapshot spacing");
  if (!(opt.gamma1 > 0.0)) throw ConfigError("Allen-Cahn diffusion coefficient must be positive");
  const double length = 2.0;
  const double dx = length / opt.nx;
  PeriodicLaplacian lap(opt.nx, length, opt.laplacian);
  if (opt.dt * opt.gamma1 * lap.spectral_radius() > 2.0)
    throw ConfigError("Allen-Cahn step dt=" + io::format_double(opt.dt) + " exceeds the explicit stability bound " +
                      io::format_double(2.0 / (opt.gamma1 * lap.spectral_radius())));

  // Equal-length steps; every snapshot interval holds the same whole number of steps.
  const auto n_snap = static_cast<std::size_t>(std::max(1.0, std::round(opt.T / opt.snapshot_dt)));
  const double interval = opt.T / static_cast<double>(n_snap);
  const auto per = static_cast<std::size_t>(std::ceil(interval / opt.dt - 1e-9));
  const double h = interval / static_cast<double>(per);

  const auto n = static_cast<std::size_t>(opt.nx);
  ReferenceSolution ref;
  ref.components = {"u"};
  for (std::size_t j = 0; j <= n; ++j) ref.space.push_back(-1.0 + dx * static_cast<double>(j));
  ref.metadata = {{"method", "method-of-lines rk4"},
                  {"system", "allen-cahn"},
                  {"laplacian", opt.laplacian == Laplacian::spectral ? "spectral" : "central2"},
                  {"nx", opt.nx},
                  {"dt", h},
                  {"T", opt.T},
                  {"gamma1", opt.gamma1},
                  {"gamma2", opt.gamma2}};

  std::vector<double> u(n), k1(n), k2(n), k3(n), k4(n), tmp(n), lu(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = ref.space[j];
    u[j] = x * x * std::cos(std::numbers::pi * x);
  }
  auto rhs = [&](const std::vector<double>& v, std::vector<double>& out) {
    lap.apply(v, lu);
    for (std::size_t j = 0; j < n; ++j) out[j] = opt.gamma1 * lu[j] + opt.gamma2 * (v[j] - v[j] * v[j] * v[j]);
  };
  auto store = [&](double t) {
    ref.times.push_back(t);
    ref.values.insert(ref.values.end(), u.begin(), u.end());
    ref.values.push_back(u.front());  // x = 1 is the x = -1 node
  };
  store(0.0);
  std::size_t step = 0;
  for (std::size_t s = 0; s < n_snap; ++s) {
    for (std::size_t r = 0; r < per; ++r) {
      rhs(u, k1);
      for (std::size_t j = 0; j < n; ++j) tmp[j] = u[j] + 0.5 * h * k1[j];
      rhs(tmp, k2);
      for (std::size_t j = 0; j < n; ++j) tmp[j] = u[j] + 0.5 * h * k2[j];
      rhs(tmp, k3);
      for (std::size_t j = 0; j < n; ++j) tmp[j] = u[j] + h * k3[j];
      rhs(tmp, k4);
      ++step;
      for (std::size_t j = 0; j < n; ++j) {
        u[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        if (!std::isfinite(u[j])) throw DivergenceError("Allen-Cahn state became non-finite", step);
      }
    }
    store(s + 1 == n_snap ? opt.T : interval * static_cast<double>(s + 1));
  }
  return ref;
}

ReferenceSolution allen_cahn_reference(int nx, double dt, double T) {
  AllenCahnOptions opt;
  opt.nx = nx;
  opt.dt = dt;
  opt.T = T;
  return allen_cahn_reference(opt);
}

double self_convergence_error(const ReferenceSolution& coarse, const ReferenceSolution& fine) {
  if (coarse.space.size() < 2 || fine.space.size() < 2) throw ConfigError("self-convergence needs space grids");
  if (coarse.times.size() != fine.times.size()) throw ConfigError("solutions have different snapshot counts");
  for (std::size_t i = 0; i < coarse.times.size(); ++i)
    if (std::abs(coarse.times[i] - fine.times[i]) > 1e-12) throw ConfigError("solutions have different snapshot times");
  const std::size_t nc = coarse.space.size() - 1, nf = fine.space.size() - 1;
  if (nf % nc != 0) throw ConfigError("fine grid does not refine the coarse grid by an integer factor");
  const std::size_t r = nf / nc;
  double worst = 0.0;
  for (std::size_t ti = 0; ti < coarse.times.size(); ++ti)
    for (std::size_t xi = 0; xi <= nc; ++xi)
      worst = std::max(worst, std::abs(coarse.at(ti, xi, 0) - fine.at(ti, xi * r, 0)));
  return worst;
}

std::string reference_csv(const ReferenceSolution& ref) {
  ref.validate();
  std::vector<std::string> header{"t"};
  if (!ref.space.empty()) header.emplace_back("x");
  header.insert(header.end(), ref.components.begin(), ref.components.end());
  std::string out = io::csv_row(header);
  std::vector<std::string> cells;
  for (std::size_t i = 0; i < ref.time_count(); ++i)
    for (std::size_t j = 0; j < ref.space_count(); ++j) {
      cells.clear();
      cells.push_back(io::format_double(ref.times[i]));
      if (!ref.space.empty()) cells.push_back(io::format_double(ref.space[j]));
      for (std::size_t c = 0; c < ref.components.size(); ++c) cells.push_back(io::format_double(ref.at(i, j, c)));
      out += io::csv_row(cells);
    }
  return out;
}

FieldDataset parse_field_snapshots(std::string_view text) {
  const io::CsvTable table = io::parse_csv(text);
  static const char* kColumns[] = {"t", "x", "y", "u", "v", "p"};
  if (table.header.empty()) throw ParseError("missing header t,x,y,u,v,p", 1);
  if (table.header.size() != 6) throw ParseError("header must be t,x,y,u,v,p", 1);
  for (std::size_t i = 0; i < 6; ++i) {
    std::string_view h = table.header[i];
    while (!h.empty() && (h.back() == ' ' || h.back() == '\r')) h.remove_suffix(1);
    while (!h.empty() && h.front() == ' ') h.remove_prefix(1);
    if (h != kColumns[i]) throw ParseError("header must be t,x,y,u,v,p", 1);
  }
  FieldDataset data;
  data.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    FieldRecord rec{io::parse_double(row[0], line), io::parse_double(row[1], line), io::parse_double(row[2], line),
                    io::parse_double(row[3], line), io::parse_double(row[4], line), io::parse_double(row[5], line)};
    data.push_back(rec);
  }
  return data;
}

FieldDataset load_field_snapshots(const std::filesystem::path& path) { return parse_field_snapshots(io::read_file(path)); }

std::string field_snapshots_csv(const FieldDataset& data) {
  std::string out = "t,x,y,u,v,p\n";
  for (const auto& r : data)
    out += io::csv_row({io::format_double(r.t), io::format_double(r.x), io::format_double(r.y), io::format_double(r.u),
                        io::format_double(r.v), io::format_double(r.p)});
  return out;
}

}  // namespace pinnfp::oracles
