#include "rootflow/linear_stability.hpp"

#include <algorithm>
#include <cmath>

#include "rootflow/errors.hpp"
#include "rootflow/parallel.hpp"
#include "rootflow/rng.hpp"

namespace rootflow::linear {
namespace {

void difference(const std::vector<double>& v, double dx, std::vector<double>& out) {
  const std::size_t m = v.size();
  out[0] = (v[1] - v[0]) / dx;
  for (std::size_t i = 1; i + 1 < m; ++i) out[i] = (v[i + 1] - v[i - 1]) / (2.0 * dx);
  out[m - 1] = (v[m - 1] - v[m - 2]) / dx;
}

void rhs_raw(const RadialGrid& grid, const std::vector<double>& w, std::vector<double>& out) {
  const std::size_t m = grid.size();
  auto avg = cumulative_integral(grid, w);
  for (std::size_t i = 0; i < m; ++i) avg[i] /= grid.center(i);
  std::vector<double> dw(m), da(m);
  difference(w, grid.dx(), dw);
  difference(avg, grid.dx(), da);
  // product rule in the first cell: the quadrature bias of W/x grows like 1/x
  // there and a one-sided stencil does not resolve it
  const double x0 = grid.center(0);
  da[0] = w[0] / x0 - avg[0] / x0;
  for (std::size_t i = 0; i < m; ++i) out[i] = dw[i] - da[i];
}

void require_samples(const RadialGrid& grid, const std::vector<double>& f) {
  require_grid_size(grid, f, "sampled function");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) {
      throw Error(ErrorCode::InvalidArgument, "sampled function must be finite", {{"index", i}});
    }
  }
}

double lemma_rhs(const RadialGrid& grid, const std::vector<double>& f, std::size_t cells) {
  double sum = 0.0;
  for (std::size_t i = 0; i < cells; ++i) sum += f[i] * f[i] / grid.center(i);
  return grid.dx() * sum;
}

std::vector<double> pool_pairs(const std::vector<double>& f) {
  std::vector<double> out(f.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (f[2 * i] + f[2 * i + 1]);
  return out;
}

// f is bounded, so f^2/x can only diverge at the origin. Compare the integral
// over the first 32 fine cells at three resolutions: a convergent integrand
// gives shrinking increments, f(0) != 0 gives a constant f(0)^2 ln 2.
void check_integrable(const RadialGrid& grid, const std::vector<double>& f) {
  constexpr std::size_t kWindow = 32;
  const std::size_t m = grid.size();
  if (m % 4 != 0 || m < kWindow) return;
  const auto half = pool_pairs(f);
  const auto quarter = pool_pairs(half);
  const double r1 = lemma_rhs(grid, f, kWindow);
  const double r2 = lemma_rhs(RadialGrid(grid.x_max(), m / 2), half, kWindow / 2);
  const double r4 = lemma_rhs(RadialGrid(grid.x_max(), m / 4), quarter, kWindow / 4);
  const double d_fine = r1 - r2;
  const double d_coarse = r2 - r4;
  if (d_fine > 1e-2 * r1 && d_coarse > 0.0 && d_fine >= 0.75 * d_coarse) {
    throw Error(ErrorCode::NonIntegrable, "f(x)^2/x does not converge at the origin",
                {{"window", grid.face(kWindow)}, {"fine", r1}, {"half", r2}, {"quarter", r4}});
  }
}

// Largest slope between adjacent nonzero samples plus the largest magnitude.
double integrand_scale(const RadialGrid& grid, const std::vector<double>& g) {
  double slope = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    peak = std::max(peak, std::fabs(g[i]));
    if (i + 1 < g.size() && g[i] != 0.0 && g[i + 1] != 0.0) {
      slope = std::max(slope, std::fabs(g[i + 1] - g[i]) / grid.dx());
    }
  }
  return slope + peak;
}

std::size_t last_nonzero(const std::vector<double>& v) {
  for (std::size_t i = v.size(); i-- > 0;) {
    if (v[i] != 0.0) return i;
  }
  return 0;
}

}  // namespace

Perturbation::Perturbation(RadialGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  require_grid_size(grid, values, "Perturbation");
  if (grid.size() < 3) throw Error(ErrorCode::InvalidArgument, "perturbation grid needs at least 3 cells");
  require_samples(grid, values);
  if (values.back() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "perturbation must vanish in the last cell",
                {{"value", values.back()}});
  }
}

std::size_t Perturbation::support_end() const { return last_nonzero(values); }

bool Perturbation::mean_zero() const {
  double sum = 0.0;
  for (double x : values) sum += x;
  return std::fabs(grid.dx() * sum) <= 1e-10;
}

double Perturbation::norm2() const {
  double sum = 0.0;
  for (double x : values) sum += x * x;
  return grid.dx() * sum;
}

std::vector<double> linearized_rhs(const Perturbation& w) {
  std::vector<double> out(w.values.size());
  rhs_raw(w.grid, w.values, out);
  return out;
}

Perturbation evolve_linearized(const Perturbation& w0, double t_end, double dt) {
  const RadialGrid& grid = w0.grid;
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::InvalidArgument, "dt must be positive", {{"dt", dt}});
  }
  if (dt > 0.5 * grid.dx() * (1.0 + 1e-12)) {
    throw Error(ErrorCode::StabilityViolation, "dt exceeds 0.5 dx", {{"dt", dt}, {"dx", grid.dx()}});
  }
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::InvalidArgument, "t_end must be nonnegative", {{"t_end", t_end}});
  }
  const std::size_t m = grid.size();
  std::vector<double> w = w0.values;
  std::vector<double> k1(m), k2(m), k3(m), k4(m), tmp(m);
  auto rhs = [&](const std::vector<double>& in, std::vector<double>& out) {
    rhs_raw(grid, in, out);
    out[m - 1] = 0.0;
  };
  double t = 0.0;
  while (t < t_end) {
    const double h = std::min(dt, t_end - t);
    rhs(w, k1);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = w[i] + 0.5 * h * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = w[i] + 0.5 * h * k2[i];
    rhs(tmp, k3);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = w[i] + h * k3[i];
    rhs(tmp, k4);
    for (std::size_t i = 0; i < m; ++i) w[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t = (h == t_end - t) ? t_end : t + h;
  }
  return Perturbation(grid, std::move(w));
}

EnergyDerivative energy_derivative(const Perturbation& w) {
  const auto& grid = w.grid;
  const auto& v = w.values;
  const auto rhs = linearized_rhs(w);
  const auto big_w = cumulative_integral(grid, v);
  double direct = 0.0;
  double bracket = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = grid.center(i);
    direct += v[i] * rhs[i];
    bracket += v[i] * v[i] / x - v[i] * big_w[i] / (x * x);
  }
  direct *= 2.0 * grid.dx();
  bracket *= grid.dx();
  const double w_origin = 1.5 * v[0] - 0.5 * v[1];
  const double boundary = -w_origin * w_origin;
  return {direct, boundary - 2.0 * bracket, boundary, bracket};
}

HardyPair hardy_pair(const RadialGrid& grid, const std::vector<double>& f) {
  require_samples(grid, f);
  const auto big_f = cumulative_integral(grid, f);
  std::vector<double> g_lhs(f.size()), g_rhs(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = grid.center(i);
    g_lhs[i] = f[i] * big_f[i] / (x * x);
    g_rhs[i] = f[i] * f[i] / x;
  }
  double lhs = 0.0;
  for (double g : g_lhs) lhs += g;
  lhs *= grid.dx();
  const double rhs = lemma_rhs(grid, f, f.size());
  check_integrable(grid, f);
  const double scale = std::max(integrand_scale(grid, g_lhs), integrand_scale(grid, g_rhs));
  return {lhs, rhs, rhs - lhs, 10.0 * grid.dx() * scale, lhs};
}

HardyPair generalized_hardy_pair(const RadialGrid& grid, const std::vector<double>& f, double p, double r) {
  if (!(p > 1.0) || !(r > 1.0) || !std::isfinite(p) || !std::isfinite(r)) {
    throw Error(ErrorCode::BadExponents, "exponents must satisfy p > 1 and r > 1", {{"p", p}, {"r", r}});
  }
  require_samples(grid, f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "generalized Hardy needs f >= 0", {{"index", i}});
    }
  }
  const auto big_f = cumulative_integral(grid, f);
  const std::size_t end = last_nonzero(f);
  std::vector<double> g_lhs(f.size()), g_rhs(f.size());
  double lhs = 0.0;
  double lhs_support = 0.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = grid.center(i);
    const double weight = std::pow(x, -r);
    g_lhs[i] = weight * std::pow(big_f[i], p);
    g_rhs[i] = weight * std::pow(x * f[i], p);
    lhs += g_lhs[i];
    if (i <= end) lhs_support += g_lhs[i];
    rhs += g_rhs[i];
  }
  double total = 0.0;
  for (double v : f) total += v;
  total *= grid.dx();
  const double tail = std::pow(total, p) * std::pow(grid.x_max(), 1.0 - r) / (r - 1.0);
  const double constant = std::pow(p / (r - 1.0), p);
  lhs = grid.dx() * lhs + tail;
  lhs_support *= grid.dx();
  rhs *= constant * grid.dx();
  const double scale = std::max(integrand_scale(grid, g_lhs), constant * integrand_scale(grid, g_rhs));
  return {lhs, rhs, rhs - lhs, 10.0 * grid.dx() * scale, lhs_support};
}

std::vector<double> random_profile(const RadialGrid& grid, std::uint64_t seed, bool nonnegative) {
  SeededStream rng(seed);
  const double support = 0.2 + 0.8 * rng.uniform();
  const auto knots = 1 + static_cast<std::size_t>(6.0 * rng.uniform());
  std::vector<double> xs{0.0};
  std::vector<double> ys{0.0};
  for (std::size_t k = 1; k <= knots; ++k) {
    xs.push_back(support * static_cast<double>(k) / static_cast<double>(knots + 1));
  }
  for (std::size_t k = 0; k < knots; ++k) {
    const double u = rng.uniform();
    ys.push_back(nonnegative ? u : 2.0 * u - 1.0);
  }
  xs.push_back(support);
  ys.push_back(0.0);

  std::vector<double> f(grid.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = grid.center(i);
    if (x >= support) break;
    const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const std::size_t lo = hi - 1;
    const double span = xs[hi] - xs[lo];
    const double frac = span > 0.0 ? (x - xs[lo]) / span : 0.0;
    f[i] = ys[lo] + frac * (ys[hi] - ys[lo]);
  }
  return f;
}

Perturbation random_mean_zero(const RadialGrid& grid, std::uint64_t seed) {
  SeededStream rng(seed);
  const double support = 0.5 + 0.5 * rng.uniform();
  const auto modes = 2 + static_cast<std::size_t>(3.0 * rng.uniform());
  std::vector<double> a(modes + 1, 0.0);
  double alternating = 0.0;
  for (std::size_t k = 1; k < modes; ++k) {
    a[k] = 2.0 * rng.uniform() - 1.0;
    alternating += (k % 2 == 0 ? 1.0 : -1.0) * a[k];
  }
  // w(L) = sum (-1)^k a_k = 0, so w is continuous where the support ends
  a[modes] = (modes % 2 == 0 ? -1.0 : 1.0) * alternating;

  std::vector<double> w(grid.size(), 0.0);
  std::size_t count = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size() && grid.center(i) < support; ++i) {
    const double theta = std::acos(-1.0) * grid.center(i) / support;
    for (std::size_t k = 1; k <= modes; ++k) w[i] += a[k] * std::cos(static_cast<double>(k) * theta);
    sum += w[i];
    ++count;
  }
  if (count > 0) {
    const double mean = sum / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) w[i] -= mean;
  }
  return Perturbation(grid, std::move(w));
}

std::vector<CorpusRow> hardy_corpus(const std::string& family, std::size_t cases, std::uint64_t seed,
                                    const RadialGrid& grid, double p, double r, unsigned jobs) {
  const bool lemma = family == "lemma";
  if (!lemma && family != "generalized") {
    throw Error(ErrorCode::InvalidArgument, "unknown Hardy family '" + family + "'");
  }
  if (!lemma && (!(p > 1.0) || !(r > 1.0))) {
    throw Error(ErrorCode::BadExponents, "exponents must satisfy p > 1 and r > 1", {{"p", p}, {"r", r}});
  }
  std::vector<CorpusRow> rows(cases);
  parallel_for(cases, jobs, [&](std::size_t k) {
    const std::uint64_t s = mix_seed(seed, k);
    const auto f = random_profile(grid, s, !lemma);
    const HardyPair h = lemma ? hardy_pair(grid, f) : generalized_hardy_pair(grid, f, p, r);
    rows[k] = {k, s, h.lhs, h.rhs, h.slack};
  });
  return rows;
}

std::vector<EnergyRow> energy_corpus(std::size_t cases, std::uint64_t seed, const RadialGrid& grid,
                                     unsigned jobs) {
  std::vector<EnergyRow> rows(cases);
  parallel_for(cases, jobs, [&](std::size_t k) {
    const std::uint64_t s = mix_seed(seed, k);
    const auto w = random_mean_zero(grid, s);
    const auto e = energy_derivative(w);
    rows[k] = {k, s, e.direct, e.decomposed, w.norm2()};
  });
  return rows;
}

}  // namespace rootflow::linear
