#include "rootflow/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "rootflow/errors.hpp"
#include "rootflow/matching.hpp"
#include "rootflow/parallel.hpp"
#include "rootflow/version.hpp"

namespace rootflow::emp {

using poly::cplx;
using poly::RootEnsemble;

namespace {

Error config_error(const std::string& what, nlohmann::json details = nlohmann::json::object()) {
  return Error(ErrorCode::Config, what, std::move(details));
}

double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Cumulative mass as a piecewise linear function with jumps: between x[j] and
// x[j+1] it runs linearly from right[j] to left[j+1]; constant right.back()
// after the last knot. x[0] = 0 and the function is 0 to the left of it.
struct Cumulative {
  std::vector<double> x, left, right;

  double after(double a) const {
    const auto j = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), a) - x.begin()) - 1;
    if (x[j] == a || j + 1 == x.size()) return right[j];
    return right[j] + (left[j + 1] - right[j]) * (a - x[j]) / (x[j + 1] - x[j]);
  }
  double before(double b) const {
    const auto j = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), b) - x.begin());
    if (j == x.size()) return right.back();
    if (x[j] == b) return left[j];
    return right[j - 1] + (left[j] - right[j - 1]) * (b - x[j - 1]) / (x[j] - x[j - 1]);
  }
  double total() const { return right.back(); }
};

Cumulative of_density(const pde::RadialDensity& psi) {
  const auto& g = psi.grid;
  Cumulative c;
  double acc = 0.0;
  for (std::size_t i = 0; i <= g.size(); ++i) {
    c.x.push_back(g.face(i));
    c.left.push_back(acc);
    c.right.push_back(acc);
    if (i < g.size()) acc += psi.values[i] * g.dx();
  }
  return c;
}

Cumulative of_histogram(const RadialHistogram& h) {
  Cumulative c;
  double acc = 0.0;
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    c.x.push_back(h.edges[i]);
    c.left.push_back(acc);
    c.right.push_back(acc);
    if (i < h.masses.size()) acc += h.masses[i];
  }
  c.right.back() += h.overflow;
  return c;
}

Cumulative of_sample(std::vector<double> r, double weight) {
  std::sort(r.begin(), r.end());
  Cumulative c{{0.0}, {0.0}, {0.0}};
  double count = 0.0;
  for (double v : r) {
    count += 1.0;
    if (v != c.x.back()) {
      c.x.push_back(v);
      c.left.push_back(c.right.back());
      c.right.push_back(0.0);
    }
    c.right.back() = count * weight;
  }
  return c;
}

// integral of |linear from a to b| over an interval of length len
double abs_linear_integral(double a, double b, double len) {
  if ((a >= 0.0) == (b >= 0.0)) return 0.5 * len * std::fabs(a + b);
  const double s = std::fabs(a) + std::fabs(b);
  return 0.5 * len * (a * a + b * b) / s;
}

CdfDistance distance(const Cumulative& h, const Cumulative& p) {
  std::vector<double> knots = h.x;
  knots.insert(knots.end(), p.x.begin(), p.x.end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  CdfDistance d{0.0, 0.0, h.total() - p.total()};
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    const double a = h.after(knots[j]) - p.after(knots[j]);
    const double b = h.before(knots[j + 1]) - p.before(knots[j + 1]);
    d.ks = std::max({d.ks, std::fabs(a), std::fabs(b)});
    d.w1 += abs_linear_integral(a, b, knots[j + 1] - knots[j]);
  }
  d.ks = std::max(d.ks, std::fabs(d.mass_gap));
  return d;
}

poly::RadialLaw initial_law(const ExperimentConfig& cfg) {
  if (cfg.dist == "taylor") return poly::RadialLaw::named("taylor_limit");
  if (cfg.dist == "table") {
    poly::RadialLaw law;
    law.kind = poly::RadialLaw::Kind::Table;
    law.table = cfg.table;
    return law;
  }
  return poly::RadialLaw::named(cfg.dist);
}

// sum gamma_k z^k / (k!)^(1/4)
poly::BigPoly quarter_taylor(std::size_t n, std::uint64_t seed, const poly::PrecisionPolicy& policy) {
  const auto gamma = poly::taylor_gaussians(n, seed);
  const mpfr_prec_t b = policy.bits;
  mp::Real f(1.0, b), root(b);
  std::vector<mp::Complex> c;
  c.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) mpfr_mul_ui(f.get(), f.get(), k, MPFR_RNDN);
    mpfr_sqrt(root.get(), f.get(), MPFR_RNDN);
    mpfr_sqrt(root.get(), root.get(), MPFR_RNDN);
    mp::Complex a(gamma[k], b);
    mpfr_div(a.re.get(), a.re.get(), root.get(), MPFR_RNDN);
    mpfr_div(a.im.get(), a.im.get(), root.get(), MPFR_RNDN);
    c.push_back(std::move(a));
  }
  return poly::BigPoly(std::move(c));
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

std::string histogram_csv(const RadialHistogram& h) {
  std::string s = "r_lo,r_hi,mass,density\n";
  for (std::size_t i = 0; i < h.masses.size(); ++i) {
    s += fmt::format("{},{},{},{}\n", num(h.edges[i]), num(h.edges[i + 1]), num(h.masses[i]),
                     num(h.masses[i] / (h.edges[i + 1] - h.edges[i])));
  }
  return s;
}

nlohmann::json metrics_json(const std::optional<CdfDistance>& m) {
  if (!m) return nullptr;
  return {{"ks", m->ks}, {"w1", m->w1}, {"mass_gap", m->mass_gap}};
}

}  // namespace

bool is_coefficient_model(const std::string& dist) { return dist == "taylor" || dist == "taylor_quarter"; }

std::size_t derivative_count(double t, std::size_t n) {
  return static_cast<std::size_t>(std::floor(t * static_cast<double>(n)));
}

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  static const std::set<std::string> dists{"taylor", "taylor_quarter", "complex_gaussian", "uniform_disk",
                                           "taylor_limit", "table"};
  if (!dists.count(c.dist)) throw config_error("unknown dist '" + c.dist + "'");
  if (c.dist == "table" && c.table.size() < 2) throw config_error("dist 'table' needs a table");
  if (c.n < 1) throw config_error("n must be positive");
  if (c.t_grid.empty()) throw config_error("t_grid must not be empty");
  for (double t : c.t_grid) {
    if (!(t >= 0.0 && t < 1.0) || derivative_count(t, c.n) >= c.n) {
      throw config_error("every t must lie in [0, 1) with floor(t n) < n", {{"t", t}});
    }
  }
  if (c.seeds.empty()) throw config_error("seeds must not be empty");
  if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
    throw config_error("seeds must be distinct");
  }
  if (c.bins < 1) throw config_error("bins must be positive");
  if (c.cells < 3) throw config_error("cells must be at least 3");
  if (!(c.cfl > 0.0) || c.cfl > pde::kMaxCfl) throw config_error("cfl must lie in (0, 0.9]", {{"cfl", c.cfl}});
  if (c.x_max == 0.0) {
    if (c.dist == "complex_gaussian") c.x_max = 4.5;
    else if (c.dist == "taylor_quarter") c.x_max = 2.0;
    else if (c.dist == "table") c.x_max = 1.2 * c.table.back().first;
    else c.x_max = 1.2;
  }
  if (!(c.x_max > 0.0) || !std::isfinite(c.x_max)) throw config_error("x_max must be positive", {{"x_max", c.x_max}});
  if (c.policy.bits == 0) {
    const auto d = poly::PrecisionPolicy::for_degree(c.n);
    c.policy.bits = d.bits;
    if (c.policy.residual_log2 == 0.0) c.policy.residual_log2 = d.residual_log2;
  } else if (c.policy.residual_log2 == 0.0) {
    c.policy.residual_log2 = -static_cast<double>(c.policy.bits) / 2.0;
  }
  c.policy.validate();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json table_json = nlohmann::json::array();
  for (auto [r, f] : table) table_json.push_back({r, f});
  return {{"n", n},
          {"t_grid", t_grid},
          {"dist", dist},
          {"table", table_json},
          {"seeds", seeds},
          {"bins", bins},
          {"x_max", x_max},
          {"cells", cells},
          {"cfl", cfl},
          {"scheme", std::string(pde::scheme_name(scheme))},
          {"bits", policy.bits},
          {"residual_log2", policy.residual_log2},
          {"max_iters", policy.max_iters}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("flow config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "t_grid") c.t_grid = v.get<std::vector<double>>();
      else if (key == "dist") c.dist = v.get<std::string>();
      else if (key == "table") c.table = v.get<std::vector<std::pair<double, double>>>();
      else if (key == "seeds") c.seeds = v.get<std::vector<std::uint64_t>>();
      else if (key == "bins") c.bins = v.get<std::size_t>();
      else if (key == "x_max") c.x_max = v.get<double>();
      else if (key == "cells") c.cells = v.get<std::size_t>();
      else if (key == "cfl") c.cfl = v.get<double>();
      else if (key == "scheme") c.scheme = pde::scheme_from_name(v.get<std::string>());
      else if (key == "bits") c.policy.bits = v.get<long>();
      else if (key == "residual_log2") c.policy.residual_log2 = v.get<double>();
      else if (key == "max_iters") c.policy.max_iters = v.get<int>();
      else throw config_error("unknown flow config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad flow config value: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    throw config_error(e.what());
  }
  return c;
}

double RadialHistogram::total() const {
  double s = overflow;
  for (double m : masses) s += m;
  return s;
}

RadialHistogram radial_histogram(const RootEnsemble& ens, std::size_t n_original, std::size_t bins, double x_max,
                                 double rescale) {
  if (!(rescale > 0.0)) throw Error(ErrorCode::InvalidArgument, "rescale must be positive", {{"rescale", rescale}});
  if (bins == 0 || !(x_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "histogram needs bins and x_max > 0");
  if (n_original == 0 && !ens.roots.empty()) throw Error(ErrorCode::InvalidArgument, "n_original must be positive");
  RadialHistogram h;
  h.rescale = rescale;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = x_max * static_cast<double>(i) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  std::size_t over = 0;
  for (auto z : ens.roots) {
    const double r = std::abs(z) / rescale;
    if (!(r < x_max)) {
      ++over;
      continue;
    }
    counts[std::min(bins - 1, static_cast<std::size_t>(r / x_max * static_cast<double>(bins)))]++;
  }
  h.masses.resize(bins);
  const double n = static_cast<double>(std::max<std::size_t>(n_original, 1));
  for (std::size_t i = 0; i < bins; ++i) h.masses[i] = static_cast<double>(counts[i]) / n;
  h.overflow = static_cast<double>(over) / n;
  return h;
}

RadialHistogram mean_histogram(const std::vector<RadialHistogram>& hs) {
  if (hs.empty()) throw Error(ErrorCode::InvalidArgument, "mean of no histograms");
  RadialHistogram m = hs.front();
  for (std::size_t k = 1; k < hs.size(); ++k) {
    if (hs[k].edges != m.edges) throw Error(ErrorCode::InvalidArgument, "histograms have different edges");
    for (std::size_t i = 0; i < m.masses.size(); ++i) m.masses[i] += hs[k].masses[i];
    m.overflow += hs[k].overflow;
  }
  const double c = static_cast<double>(hs.size());
  for (double& v : m.masses) v /= c;
  m.overflow /= c;
  return m;
}

CdfDistance cdf_distance(const RadialHistogram& h, const pde::RadialDensity& psi) {
  return distance(of_histogram(h), of_density(psi));
}

CdfDistance cdf_distance(std::vector<double> radii, double weight, const pde::RadialDensity& psi) {
  return distance(of_sample(std::move(radii), weight), of_density(psi));
}

CdfDistance cdf_distance(const pde::RadialDensity& a, const pde::RadialDensity& b) {
  return distance(of_density(a), of_density(b));
}

pde::RadialDensity law_density(const poly::RadialLaw& law, const RadialGrid& grid) {
  std::vector<double> v(grid.size());
  double lo = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double hi = law.cdf(grid.face(i + 1));
    v[i] = (hi - lo) / grid.dx();
    lo = hi;
  }
  return pde::RadialDensity(grid, std::move(v));
}

FlowReport run_flow_experiment(const ExperimentConfig& raw, unsigned jobs) {
  const ExperimentConfig cfg = raw.resolved();
  const RadialGrid grid(cfg.x_max, cfg.cells);
  const bool has_reference = cfg.dist != "taylor_quarter";

  std::vector<std::optional<pde::RadialDensity>> refs(cfg.t_grid.size());
  if (has_reference) {
    const auto psi0 = law_density(initial_law(cfg), grid);
    for (std::size_t k = 0; k < cfg.t_grid.size(); ++k) {
      refs[k] = pde::evolve(psi0, cfg.t_grid[k], cfg.cfl, pde::kDefaultVacuum, cfg.scheme).density;
    }
  }

  std::vector<std::uint64_t> seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  const std::size_t nt = cfg.t_grid.size();
  const double n = static_cast<double>(cfg.n);
  const double rescale = cfg.dist == "taylor" ? n : cfg.dist == "taylor_quarter" ? std::pow(n, 0.25) : 1.0;

  std::vector<std::optional<poly::BigPoly>> polys(seeds.size());
  parallel_for(seeds.size(), jobs, [&](std::size_t s) {
    if (cfg.dist == "taylor") polys[s] = poly::random_taylor(cfg.n, seeds[s], cfg.policy);
    else if (cfg.dist == "taylor_quarter") polys[s] = quarter_taylor(cfg.n, seeds[s], cfg.policy);
    else polys[s] = poly::poly_from_roots(poly::sample_radial_roots(initial_law(cfg), cfg.n, seeds[s]), cfg.policy);
  });

  std::vector<std::optional<TrialSlice>> slots(seeds.size() * nt);
  parallel_for(slots.size(), jobs, [&](std::size_t idx) {
    const std::size_t s = idx / nt;
    const std::size_t k = idx % nt;
    const double t = cfg.t_grid[k];
    const std::size_t d = derivative_count(t, cfg.n);
    try {
      auto roots = poly::find_roots(poly::differentiate(*polys[s], d), cfg.policy);
      roots.seed = seeds[s];
      std::vector<double> radii;
      radii.reserve(roots.roots.size());
      for (auto& z : roots.roots) {
        z /= rescale;
        radii.push_back(std::abs(z));
      }
      if (rescale != 1.0) roots.provenance = poly::Provenance::Rescaled;
      auto hist = radial_histogram(roots, cfg.n, cfg.bins, cfg.x_max, 1.0);
      hist.rescale = rescale;
      std::optional<CdfDistance> m;
      if (refs[k]) m = cdf_distance(std::move(radii), 1.0 / n, *refs[k]);
      slots[idx] = TrialSlice{seeds[s], t, d, rescale, std::move(roots), std::move(hist), m};
    } catch (Error& e) {
      e.details()["seed"] = seeds[s];
      e.details()["t"] = t;
      throw;
    }
  });

  FlowReport report;
  report.config = cfg;
  for (auto& slot : slots) report.trials.push_back(std::move(*slot));
  for (std::size_t k = 0; k < nt; ++k) {
    std::vector<RadialHistogram> hs;
    std::vector<double> w1, ks;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& tr = report.trials[s * nt + k];
      hs.push_back(tr.histogram);
      if (tr.metrics) {
        w1.push_back(tr.metrics->w1);
        ks.push_back(tr.metrics->ks);
      }
    }
    FlowSlice slice{cfg.t_grid[k], derivative_count(cfg.t_grid[k], cfg.n), mean_histogram(hs), {}, {}, {}, refs[k]};
    if (refs[k]) {
      slice.metrics = cdf_distance(slice.mean, *refs[k]);
      slice.median_w1 = median(w1);
      slice.median_ks = median(ks);
    }
    report.slices.push_back(std::move(slice));
  }
  return report;
}

nlohmann::json write_flow_report(const FlowReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& cfg = report.config;
  write_text(dir / "config.json", cfg.to_json().dump(2) + "\n");

  std::string metrics = "t,seed,ks,w1,mass_gap\n";
  for (const auto& tr : report.trials) {
    if (!tr.metrics) continue;
    metrics += fmt::format("{},{},{},{},{}\n", num(tr.t), tr.seed, num(tr.metrics->ks), num(tr.metrics->w1),
                           num(tr.metrics->mass_gap));
  }
  write_text(dir / "metrics.csv", metrics);

  for (const auto& tr : report.trials) {
    const auto sub = dir / fmt::format("trial_{}", tr.seed);
    std::filesystem::create_directories(sub);
    std::ostringstream roots;
    poly::write_roots_csv(roots, tr.roots);
    write_text(sub / fmt::format("roots_t{}.csv", tr.derivatives), roots.str());
    write_text(sub / fmt::format("hist_t{}.csv", tr.derivatives), histogram_csv(tr.histogram));
  }

  nlohmann::json slices = nlohmann::json::array();
  for (const auto& s : report.slices) {
    write_text(dir / fmt::format("hist_t{}.csv", s.derivatives), histogram_csv(s.mean));
    slices.push_back({{"t", s.t},
                      {"derivatives", s.derivatives},
                      {"total_mass", s.mean.total()},
                      {"overflow", s.mean.overflow},
                      {"mean_histogram", metrics_json(s.metrics)},
                      {"median_w1", s.median_w1 ? nlohmann::json(*s.median_w1) : nlohmann::json(nullptr)},
                      {"median_ks", s.median_ks ? nlohmann::json(*s.median_ks) : nlohmann::json(nullptr)}});
  }
  const double rescale = report.trials.empty() ? 1.0 : report.trials.front().rescale;
  return {{"subcommand", "flow"},
          {"version", kVersion},
          {"config", cfg.to_json()},
          {"seeds", cfg.seeds},
          {"rescale", rescale},
          {"reference", cfg.dist == "taylor_quarter" ? "none" : "evolve"},
          {"slices", slices}};
}

double ks_uniform_radius(std::vector<double> radii) {
  if (radii.empty()) return 0.0;
  std::sort(radii.begin(), radii.end());
  const double n = static_cast<double>(radii.size());
  double d = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double f = std::min(radii[i], 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double kz_check(std::size_t n, std::uint64_t seed, poly::PrecisionPolicy policy) {
  if (n < 16) throw Error(ErrorCode::InvalidArgument, "kz_check needs n >= 16", {{"n", n}});
  if (policy.bits == 0) policy = poly::PrecisionPolicy::for_degree(n);
  const auto roots = poly::find_roots(poly::random_taylor(n, seed, policy), policy);
  std::vector<double> radii;
  for (auto z : roots.roots) radii.push_back(std::abs(z) / static_cast<double>(n));
  return ks_uniform_radius(std::move(radii));
}

PairingReport pairing_check(const RootEnsemble& ens, const poly::PrecisionPolicy& policy) {
  const std::size_t n = ens.roots.size();
  if (n < 8) throw Error(ErrorCode::InvalidArgument, "pairing_check needs at least 8 roots", {{"n", n}});
  PairingReport rep;
  rep.roots = ens.roots;
  rep.critical_points = poly::find_roots(poly::differentiate(poly::poly_from_roots(ens, policy), 1), policy).roots;

  // the extra column costs the same for every row, so any perfect assignment
  // uses it exactly once and it does not bias the exact solver; for the
  // greedy pass it is the most expensive option and is taken last
  double worst = 0.0;
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < n; ++j) {
      cost[i * n + j] = std::abs(ens.roots[i] - rep.critical_points[j]);
      worst = std::max(worst, cost[i * n + j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) cost[i * n + n - 1] = 2.0 * worst + 1.0;
  const auto sigma = assignment(cost, n);
  rep.matching = n <= 256 ? "hungarian" : "greedy";

  std::vector<double> moduli, dist;
  for (std::size_t i = 0; i < n; ++i) {
    moduli.push_back(std::abs(ens.roots[i]));
    if (sigma[i] == n - 1) {
      rep.unpaired = i;
      rep.unpaired_modulus = moduli.back();
      continue;
    }
    RootPair p{i, sigma[i], cost[i * n + sigma[i]], std::nullopt};
    try {
      p.shift_error = std::abs(poly::predicted_shift(ens, i) - rep.critical_points[sigma[i]]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SumNearZero && e.code() != ErrorCode::PoleHit) throw;
    }
    dist.push_back(p.distance);
    rep.pairs.push_back(p);
  }
  rep.median_root_modulus = median(moduli);
  rep.median_pair_distance = median(dist);
  return rep;
}

}  // namespace rootflow::emp
