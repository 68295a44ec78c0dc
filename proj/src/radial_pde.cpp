#include "rootflow/radial_pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rootflow/errors.hpp"

namespace rootflow::pde {
namespace {

std::vector<double> face_masses(const RadialDensity& psi) {
  const auto& v = psi.values;
  std::vector<double> out(v.size() + 1, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) out[i + 1] = out[i] + psi.grid.dx() * v[i];
  return out;
}

// Smallest cell-center average over cells that are not vacuum, or eps_vac when
// every cell is vacuum.
double min_nonvacuum_average(const RadialDensity& psi, double eps_vac) {
  const auto avg = cumulative_average(psi);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < avg.values.size(); ++i) {
    const double a = avg.values[i];
    if (a >= eps_vac && psi.values[i] > 0.0) lo = std::min(lo, a);
  }
  return std::isfinite(lo) ? lo : eps_vac;
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::fabs(a) < std::fabs(b) ? a : b;
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive and finite",
                {{std::string(what), value}});
  }
}

}  // namespace

RadialDensity::RadialDensity(RadialGrid g, std::vector<double> v, double t)
    : grid(g), values(std::move(v)), time(t) {
  require_grid_size(grid, values, "RadialDensity");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "density values must be finite and nonnegative",
                  {{"index", i}, {"value", values[i]}});
    }
  }
  if (!(time >= 0.0) || !std::isfinite(time)) {
    throw Error(ErrorCode::InvalidArgument, "density time must be nonnegative", {{"time", time}});
  }
}

CumulativeAverage cumulative_average(const RadialDensity& psi) {
  auto integral = cumulative_integral(psi.grid, psi.values);
  for (std::size_t i = 0; i < integral.size(); ++i) integral[i] /= psi.grid.center(i);
  return {psi.grid, std::move(integral)};
}

VelocityField velocity(const CumulativeAverage& avg, double eps_vac) {
  require_positive(eps_vac, "eps_vac");
  std::vector<double> v(avg.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -1.0 / std::max(avg.values[i], eps_vac);
  return {avg.grid, std::move(v)};
}

double origin_flux(const RadialDensity& psi, double eps_vac) {
  // A at the first interior face equals psi_0 exactly.
  const double psi0 = psi.values.front();
  return -psi0 / std::max(psi0, eps_vac);
}

StepResult step(const RadialDensity& psi, double dt, double eps_vac, Scheme scheme) {
  require_positive(dt, "dt");
  require_positive(eps_vac, "eps_vac");
  const auto& grid = psi.grid;
  const std::size_t m = grid.size();
  const double dx = grid.dx();

  const double bound = kMaxCfl * dx * min_nonvacuum_average(psi, eps_vac);
  if (dt > bound * (1.0 + 1e-12)) {
    throw Error(ErrorCode::StabilityViolation, "time step exceeds the CFL bound",
                {{"dt", dt}, {"bound", bound}});
  }

  const auto fm = face_masses(psi);
  const auto& p = psi.values;
  // flux[i] lives on the left face of cell i; flux[m] = 0 (no inflow at x_max).
  std::vector<double> flux(m + 1, 0.0);
  const double outflow_cap = dx / dt;
  for (std::size_t i = 0; i < m; ++i) {
    if (p[i] == 0.0) continue;
    // upwind state: the wind points to the origin, so the face takes cell i
    double state = p[i];
    if (scheme == Scheme::Minmod && i > 0) {
      const double right = (i + 1 < m) ? p[i + 1] : 0.0;
      state = p[i] - 0.5 * minmod(p[i] - p[i - 1], right - p[i]);
    }
    const double a = (i == 0) ? fm[1] / dx : fm[i] / grid.face(i);
    double f = -state / std::max(a, eps_vac);
    // never drain more than the cell holds
    f = std::max(f, -p[i] * outflow_cap);
    flux[i] = f;
  }

  std::vector<double> next(m);
  const double ratio = dt / dx;
  for (std::size_t i = 0; i < m; ++i) {
    next[i] = std::max(0.0, psi.values[i] - ratio * (flux[i + 1] - flux[i]));
  }
  return {RadialDensity(grid, std::move(next), psi.time + dt), flux[0]};
}

double adaptive_dt(const RadialDensity& psi, double cfl, double eps_vac) {
  require_positive(cfl, "cfl");
  require_positive(eps_vac, "eps_vac");
  const double dt = cfl * psi.grid.dx() * min_nonvacuum_average(psi, eps_vac);
  return std::max(dt, 1e-12 * psi.grid.x_max());
}

Evolution evolve(const RadialDensity& psi0, double t_end, double cfl, double eps_vac, Scheme scheme) {
  if (!(cfl > 0.0) || cfl > kMaxCfl) {
    throw Error(ErrorCode::InvalidArgument, "cfl must lie in (0, 0.9]", {{"cfl", cfl}});
  }
  if (!(t_end >= psi0.time) || !(t_end < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "t_end must satisfy start <= t_end < 1",
                {{"t_end", t_end}, {"start", psi0.time}});
  }
  Evolution out{psi0, {}};
  out.series.push_back({psi0.time, mass(psi0), origin_flux(psi0, eps_vac)});
  while (out.density.time < t_end) {
    const double remaining = t_end - out.density.time;
    double dt = adaptive_dt(out.density, cfl, eps_vac);
    const bool last = dt >= remaining;
    if (last) dt = remaining;
    auto res = step(out.density, dt, eps_vac, scheme);
    out.density = std::move(res.density);
    if (last) out.density.time = t_end;
    out.series.push_back({out.density.time, mass(out.density), res.origin_flux});
  }
  return out;
}

RadialDensity indicator_solution(double t, const RadialGrid& grid) {
  if (!(t >= 0.0) || !(t <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "indicator time must lie in [0, 1]", {{"t", t}});
  }
  const double front = 1.0 - t;
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double lo = grid.face(i);
    const double hi = grid.face(i + 1);
    v[i] = std::clamp((front - lo) / (hi - lo), 0.0, 1.0);
  }
  return RadialDensity(grid, std::move(v), t);
}

RadialDensity rescale(const RadialDensity& psi, double lambda) {
  require_positive(lambda, "lambda");
  const auto& grid = psi.grid;
  const std::size_t m = grid.size();
  const double dx = grid.dx();

  if (lambda == 1.0) return psi;
  if (lambda < 1.0) {
    // mass that would be pushed past x_max must be negligible
    const double cutoff = lambda * grid.x_max();
    double lost = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (grid.face(i + 1) > cutoff * (1.0 + 1e-12)) lost += dx * psi.values[i];
    }
    if (lost > 1e-12 * std::max(mass(psi), 1e-300)) {
      throw Error(ErrorCode::DomainTooSmall, "rescaled support does not fit on the grid",
                  {{"lambda", lambda}, {"lost_mass", lost}, {"x_max", grid.x_max()}});
    }
  }

  auto sample = [&](double y) {
    if (y >= grid.x_max()) return 0.0;
    const double s = y / dx - 0.5;
    if (s <= 0.0) return psi.values.front();
    const auto j = static_cast<std::size_t>(s);
    if (j + 1 >= m) return psi.values.back();
    const double frac = s - static_cast<double>(j);
    return (1.0 - frac) * psi.values[j] + frac * psi.values[j + 1];
  };

  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = lambda * sample(lambda * grid.center(i));
  return RadialDensity(grid, std::move(v), psi.time);
}

double mass(const RadialDensity& psi) {
  double sum = 0.0;
  for (double v : psi.values) sum += v;
  return psi.grid.dx() * sum;
}

double l1_distance(const RadialDensity& a, const RadialDensity& b) {
  if (!(a.grid == b.grid)) {
    throw Error(ErrorCode::InvalidArgument, "l1_distance needs densities on the same grid");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) sum += std::fabs(a.values[i] - b.values[i]);
  return a.grid.dx() * sum;
}

RadialDensity sample_profile(const RadialGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.center(i));
  return RadialDensity(grid, std::move(v), 0.0);
}

RadialDensity initial_profile(std::string_view name, const RadialGrid& grid) {
  if (name == "indicator" || name == "taylor_limit") return indicator_solution(0.0, grid);
  if (name == "complex_gaussian") {
    return sample_profile(grid, [](double r) { return 2.0 * r * std::exp(-r * r); });
  }
  if (name == "uniform_disk") {
    return sample_profile(grid, [](double r) { return r <= 1.0 ? 2.0 * r : 0.0; });
  }
  if (name == "bump") {
    return sample_profile(grid, [](double r) {
      const double q = 1.0 - r * r;
      return r <= 1.0 ? 15.0 / 8.0 * q * q : 0.0;
    });
  }
  throw Error(ErrorCode::InvalidArgument, "unknown initial profile '" + std::string(name) + "'");
}

Scheme scheme_from_name(std::string_view name) {
  if (name == "minmod") return Scheme::Minmod;
  if (name == "upwind") return Scheme::Upwind;
  throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

std::string_view scheme_name(Scheme scheme) {
  return scheme == Scheme::Upwind ? "upwind" : "minmod";
}

std::vector<std::string> profile_names() {
  return {"indicator", "complex_gaussian", "uniform_disk", "bump"};
}

}  // namespace rootflow::pde
