#include "rootflow/polyroots.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <gmp.h>

#include "rootflow/errors.hpp"
#include "rootflow/rng.hpp"

namespace rootflow::poly {
namespace {

using ldc = std::complex<long double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(cplx z, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be finite",
                {{"re", z.real()}, {"im", z.imag()}});
  }
}

// Horner for p and p' at z.
void horner(const std::vector<mp::Complex>& a, const mp::Complex& z, mp::Complex& p, mp::Complex& dp,
            mp::Workspace& ws) {
  const std::size_t n = a.size() - 1;
  p.set(a[n]);
  mpfr_set_zero(dp.re.get(), 1);
  mpfr_set_zero(dp.im.get(), 1);
  for (std::size_t k = n; k-- > 0;) {
    ws.mul_add(dp, z, p);
    ws.mul_add(p, z, a[k]);
  }
}

// log2 of sum |a_k| |z|^k from log2 |a_k|.
double scale_log2(const std::vector<double>& log_a, double log_z) {
  double peak = -kInf;
  for (std::size_t k = 0; k < log_a.size(); ++k) {
    if (std::isinf(log_a[k])) continue;
    const double term = log_a[k] + (k == 0 ? 0.0 : static_cast<double>(k) * log_z);
    peak = std::max(peak, term);
  }
  if (std::isinf(peak)) return peak;
  double sum = 0.0;
  for (std::size_t k = 0; k < log_a.size(); ++k) {
    if (std::isinf(log_a[k])) continue;
    const double term = log_a[k] + (k == 0 ? 0.0 : static_cast<double>(k) * log_z);
    sum += std::exp2(term - peak);
  }
  return peak + std::log2(sum);
}

// Starting points from the upper convex hull of (k, log2 |a_k|).
std::vector<ldc> newton_polygon_guesses(const std::vector<double>& log_a) {
  std::vector<std::size_t> hull;
  for (std::size_t k = 0; k < log_a.size(); ++k) {
    if (std::isinf(log_a[k])) continue;
    while (hull.size() >= 2) {
      const std::size_t i = hull[hull.size() - 2];
      const std::size_t j = hull.back();
      // drop j when it lies on or below the chord i -> k
      const double cross = (log_a[j] - log_a[i]) * static_cast<double>(k - i) -
                           (log_a[k] - log_a[i]) * static_cast<double>(j - i);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(k);
  }
  std::vector<ldc> out;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
    const std::size_t i = hull[e];
    const std::size_t j = hull[e + 1];
    const std::size_t count = j - i;
    const long double radius = std::exp2((static_cast<long double>(log_a[i]) - log_a[j]) / count);
    for (std::size_t q = 0; q < count; ++q) {
      const long double angle = two_pi * q / count + 0.37L + static_cast<long double>(i);
      out.push_back(std::polar(radius, angle));
    }
  }
  return out;
}

bool finite_ld(ldc z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Aberth in long double. Leaves iterates untouched where evaluation overflows.
void long_double_pass(const std::vector<mp::Complex>& a, std::vector<ldc>& z) {
  const std::size_t n = a.size() - 1;
  std::vector<ldc> c(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    c[k] = a[k].to_complex_ld();
    if (!finite_ld(c[k]) || (c[k] == ldc(0) && !a[k].is_zero())) return;
  }
  std::vector<char> done(n, 0);
  std::vector<ldc> next(z);
  const long double stop = std::exp2(-60.0L);
  for (int sweep = 0; sweep < 200; ++sweep) {
    bool active = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      ldc p = c[n];
      ldc dp = 0;
      for (std::size_t k = n; k-- > 0;) {
        dp = dp * z[i] + p;
        p = p * z[i] + c[k];
      }
      if (!finite_ld(p) || !finite_ld(dp) || dp == ldc(0)) {
        done[i] = 1;
        continue;
      }
      if (p == ldc(0)) {
        done[i] = 1;
        continue;
      }
      const ldc ratio = p / dp;
      ldc sum = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) sum += 1.0L / (z[i] - z[j]);
      }
      const ldc w = ratio / (1.0L - ratio * sum);
      if (!finite_ld(w)) {
        done[i] = 1;
        continue;
      }
      next[i] = z[i] - w;
      if (std::abs(w) <= stop * std::abs(z[i])) done[i] = 1;
      active = true;
    }
    z = next;
    if (!active) break;
  }
}

}  // namespace

PrecisionPolicy PrecisionPolicy::with_bits(long bits) {
  PrecisionPolicy p;
  p.bits = bits;
  p.residual_log2 = -static_cast<double>(bits) / 2.0;
  return p;
}

PrecisionPolicy PrecisionPolicy::for_degree(std::size_t n) {
  return with_bits(std::max<long>(256, 4 * static_cast<long>(n)));
}

void PrecisionPolicy::validate() const {
  if (bits < 64) throw Error(ErrorCode::Config, "precision must be at least 64 bits", {{"bits", bits}});
  if (!(residual_log2 >= -static_cast<double>(bits) / 2.0) || !(residual_log2 < 0.0)) {
    throw Error(ErrorCode::Config, "residual tolerance must lie in [2^(-B/2), 1)",
                {{"bits", bits}, {"residual_log2", residual_log2}});
  }
  if (max_iters <= 0) throw Error(ErrorCode::Config, "max_iters must be positive", {{"max_iters", max_iters}});
}

BigPoly::BigPoly(std::vector<mp::Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw Error(ErrorCode::InvalidArgument, "polynomial needs at least one coefficient");
  if (coeffs_.back().is_zero()) {
    throw Error(ErrorCode::InvalidArgument, "leading coefficient must be nonzero",
                {{"degree", coeffs_.size() - 1}});
  }
  const mpfr_prec_t b = coeffs_.front().precision();
  if (b < 64) throw Error(ErrorCode::InvalidArgument, "polynomial precision must be at least 64 bits");
  for (const auto& c : coeffs_) {
    if (c.precision() != b || c.im.precision() != b) {
      throw Error(ErrorCode::InvalidArgument, "coefficients must share one precision");
    }
  }
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Sampled: return "sampled";
    case Provenance::Solved: return "solved";
    case Provenance::Rescaled: return "rescaled";
  }
  return "sampled";
}

BigPoly poly_from_roots(const RootEnsemble& roots, const PrecisionPolicy& policy) {
  policy.validate();
  const mpfr_prec_t b = policy.bits;
  std::vector<mp::Complex> c;
  c.reserve(roots.roots.size() + 1);
  c.emplace_back(1.0, 0.0, b);
  mp::Workspace ws(b);
  mp::Complex r(b), tmp(b);
  for (const cplx root : roots.roots) {
    require_finite(root, "root");
    mpfr_set_d(r.re.get(), root.real(), MPFR_RNDN);
    mpfr_set_d(r.im.get(), root.imag(), MPFR_RNDN);
    const std::size_t m = c.size() - 1;
    mp::Complex top = c[m];
    c.push_back(std::move(top));
    for (std::size_t k = m; k >= 1; --k) {
      ws.mul(tmp, c[k], r);
      mp::sub(c[k], c[k - 1], tmp);
    }
    ws.mul(tmp, c[0], r);
    mpfr_neg(c[0].re.get(), tmp.re.get(), MPFR_RNDN);
    mpfr_neg(c[0].im.get(), tmp.im.get(), MPFR_RNDN);
  }
  return BigPoly(std::move(c));
}

BigPoly differentiate(const BigPoly& p, std::size_t k) {
  const std::size_t n = p.degree();
  if (k > n) {
    throw Error(ErrorCode::DegreeUnderflow, "cannot differentiate more often than the degree",
                {{"k", k}, {"degree", n}});
  }
  const mpfr_prec_t b = p.bits();
  std::vector<mp::Complex> out;
  out.reserve(n - k + 1);
  mpz_t factor;
  mpz_init(factor);
  for (std::size_t j = 0; j + k <= n; ++j) {
    // (j+k)! / j!
    mpz_set_ui(factor, 1);
    for (std::size_t i = j + 1; i <= j + k; ++i) mpz_mul_ui(factor, factor, static_cast<unsigned long>(i));
    mp::Complex c(b);
    mpfr_mul_z(c.re.get(), p.coeff(j + k).re.get(), factor, MPFR_RNDN);
    mpfr_mul_z(c.im.get(), p.coeff(j + k).im.get(), factor, MPFR_RNDN);
    out.push_back(std::move(c));
  }
  mpz_clear(factor);
  return BigPoly(std::move(out));
}

BigPoly scale_argument(const BigPoly& p, double lambda) {
  if (!(lambda != 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be finite and nonzero", {{"lambda", lambda}});
  }
  const mpfr_prec_t b = p.bits();
  mp::Real power(1.0, b);
  std::vector<mp::Complex> out;
  out.reserve(p.degree() + 1);
  for (std::size_t k = 0; k <= p.degree(); ++k) {
    mp::Complex c(b);
    mpfr_mul(c.re.get(), p.coeff(k).re.get(), power.get(), MPFR_RNDN);
    mpfr_mul(c.im.get(), p.coeff(k).im.get(), power.get(), MPFR_RNDN);
    out.push_back(std::move(c));
    mpfr_mul_d(power.get(), power.get(), lambda, MPFR_RNDN);
  }
  return BigPoly(std::move(out));
}

std::pair<cplx, cplx> evaluate(const BigPoly& p, cplx z) {
  require_finite(z, "z");
  const mpfr_prec_t b = p.bits();
  mp::Workspace ws(b);
  mp::Complex zz(z, b), v(b), dv(b);
  horner(p.coeffs(), zz, v, dv, ws);
  return {v.to_complex(), dv.to_complex()};
}

cplx log_derivative(const BigPoly& p, cplx z) {
  require_finite(z, "z");
  const mpfr_prec_t b = p.bits();
  mp::Workspace ws(b);
  mp::Complex zz(z, b), v(b), dv(b), q(b);
  horner(p.coeffs(), zz, v, dv, ws);
  if (v.is_zero()) throw Error(ErrorCode::PoleHit, "z is a root of p", {{"re", z.real()}, {"im", z.imag()}});
  ws.div(q, dv, v);
  return q.to_complex();
}

RootEnsemble find_roots(const BigPoly& poly, const PrecisionPolicy& policy) {
  policy.validate();
  if (poly.degree() == 0) throw Error(ErrorCode::InvalidArgument, "find_roots needs degree >= 1");
  const mpfr_prec_t b = policy.bits;
  RootEnsemble out;
  out.provenance = Provenance::Solved;

  // exact zeros from trailing zero coefficients
  std::size_t zeros = 0;
  while (zeros < poly.degree() && poly.coeff(zeros).is_zero()) ++zeros;
  out.roots.assign(zeros, cplx(0.0, 0.0));
  std::vector<mp::Complex> a;
  for (std::size_t k = zeros; k <= poly.degree(); ++k) {
    mp::Complex c(b);
    c.set(poly.coeff(k));
    a.push_back(std::move(c));
  }
  const std::size_t n = a.size() - 1;
  if (n == 0) return out;

  mp::Workspace ws(b);
  if (n == 1) {
    mp::Complex r(b);
    ws.div(r, a[0], a[1]);
    out.roots.push_back(-r.to_complex());
    return out;
  }

  std::vector<double> log_a(n + 1);
  for (std::size_t k = 0; k <= n; ++k) log_a[k] = ws.abs_log2(a[k]);

  std::vector<ldc> guess = newton_polygon_guesses(log_a);
  long_double_pass(a, guess);

  std::vector<mp::Complex> z;
  z.reserve(n);
  for (const ldc& g : guess) {
    mp::Complex c(b);
    c.set(g);
    z.push_back(std::move(c));
  }

  const double cluster_log2 = -static_cast<double>(b) / 4.0;
  std::vector<char> frozen(n, 0);
  std::vector<mp::Complex> step;
  for (std::size_t i = 0; i < n; ++i) step.emplace_back(b);
  std::vector<char> moving(n, 0);
  mp::Complex pv(b), dv(b), ratio(b), sum_mp(b), t(b), diff(b);
  double worst = kInf;
  int sweep = 0;
  for (; sweep < policy.max_iters; ++sweep) {
    double radius_log2 = -kInf;
    for (const auto& zi : z) radius_log2 = std::max(radius_log2, ws.abs_log2(zi));
    worst = -kInf;
    std::size_t open = 0;
    for (std::size_t i = 0; i < n; ++i) {
      moving[i] = 0;
      if (frozen[i]) continue;
      horner(a, z[i], pv, dv, ws);
      const double p_log2 = ws.abs_log2(pv);
      const double s_log2 = scale_log2(log_a, ws.abs_log2(z[i]));
      const double rel = p_log2 - s_log2;
      if (pv.is_zero() || rel <= policy.residual_log2) {
        frozen[i] = 1;
        continue;
      }
      worst = std::max(worst, rel);
      ++open;
      if (dv.is_zero()) {
        // nudge off a critical point
        mpfr_set_d(step[i].re.get(), std::exp2(radius_log2 - 20.0), MPFR_RNDN);
        mpfr_set_zero(step[i].im.get(), 1);
        moving[i] = 1;
        continue;
      }
      ws.div(ratio, pv, dv);
      ldc sum = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        mp::sub(diff, z[i], z[j]);
        sum += 1.0L / diff.to_complex_ld();
      }
      // correction ratio / (1 - ratio * sum) at full precision
      sum_mp.set(sum);
      ws.mul(t, ratio, sum_mp);
      mpfr_ui_sub(t.re.get(), 1, t.re.get(), MPFR_RNDN);
      mpfr_neg(t.im.get(), t.im.get(), MPFR_RNDN);
      ws.div(step[i], ratio, t);
      moving[i] = 1;
      if (ws.abs_log2(step[i]) <= cluster_log2 + radius_log2) frozen[i] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (moving[i]) mp::sub(z[i], z[i], step[i]);
    }
    if (open == 0) break;
  }
  if (std::find(frozen.begin(), frozen.end(), 0) != frozen.end()) {
    const auto unconverged = static_cast<std::size_t>(std::count(frozen.begin(), frozen.end(), 0));
    throw Error(ErrorCode::NoConvergence, "Aberth iteration did not converge; raise the precision",
                {{"iterations", sweep}, {"worst_residual_log2", worst}, {"unconverged", unconverged},
                 {"degree", poly.degree()}, {"bits", b}});
  }
  for (const auto& zi : z) out.roots.push_back(zi.to_complex());
  return out;
}

std::vector<cplx> taylor_gaussians(std::size_t n, std::uint64_t seed) {
  SeededStream rng(seed);
  std::vector<cplx> g(n + 1);
  for (auto& x : g) x = rng.complex_gaussian();
  while (g[n] == cplx(0.0, 0.0)) g[n] = rng.complex_gaussian();
  return g;
}

BigPoly random_taylor(std::size_t n, std::uint64_t seed, const PrecisionPolicy& policy) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "random_taylor needs n >= 1", {{"n", n}});
  policy.validate();
  const mpfr_prec_t b = policy.bits;
  const auto g = taylor_gaussians(n, seed);
  mp::Real factorial(1.0, b);
  std::vector<mp::Complex> c;
  c.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) mpfr_mul_ui(factorial.get(), factorial.get(), static_cast<unsigned long>(k), MPFR_RNDN);
    mp::Complex v(g[k], b);
    mpfr_div(v.re.get(), v.re.get(), factorial.get(), MPFR_RNDN);
    mpfr_div(v.im.get(), v.im.get(), factorial.get(), MPFR_RNDN);
    c.push_back(std::move(v));
  }
  return BigPoly(std::move(c));
}

RadialLaw RadialLaw::named(std::string_view name) {
  RadialLaw law;
  if (name == "complex_gaussian") law.kind = Kind::ComplexGaussian;
  else if (name == "uniform_disk") law.kind = Kind::UniformDisk;
  else if (name == "taylor_limit") law.kind = Kind::TaylorLimit;
  else throw Error(ErrorCode::InvalidArgument, "unknown radial law '" + std::string(name) + "'");
  return law;
}

std::string RadialLaw::name() const {
  switch (kind) {
    case Kind::ComplexGaussian: return "complex_gaussian";
    case Kind::UniformDisk: return "uniform_disk";
    case Kind::TaylorLimit: return "taylor_limit";
    case Kind::Table: return "table";
  }
  return "table";
}

namespace {

void validate_table(const std::vector<std::pair<double, double>>& t) {
  auto bad = [](const std::string& why, nlohmann::json d = nlohmann::json::object()) {
    return Error(ErrorCode::BadTable, "radial CDF table: " + why, std::move(d));
  };
  if (t.size() < 2) throw bad("needs at least two knots");
  if (std::fabs(t.front().second) > 1e-12) throw bad("must start at 0", {{"cdf", t.front().second}});
  if (std::fabs(t.back().second - 1.0) > 1e-12) throw bad("must end at 1", {{"cdf", t.back().second}});
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i].first) || !std::isfinite(t[i].second) || t[i].first < 0.0) {
      throw bad("knots must be finite with r >= 0", {{"index", i}});
    }
    if (i > 0 && !(t[i].first > t[i - 1].first)) throw bad("radii must increase", {{"index", i}});
    if (i > 0 && t[i].second < t[i - 1].second) throw bad("cdf must be nondecreasing", {{"index", i}});
  }
}

}  // namespace

double RadialLaw::cdf(double r) const {
  if (r <= 0.0) return 0.0;
  switch (kind) {
    case Kind::ComplexGaussian: return -std::expm1(-r * r);
    case Kind::UniformDisk: return r >= 1.0 ? 1.0 : r * r;
    case Kind::TaylorLimit: return r >= 1.0 ? 1.0 : r;
    case Kind::Table: {
      validate_table(table);
      if (r <= table.front().first) return table.front().second;
      if (r >= table.back().first) return 1.0;
      const auto it = std::upper_bound(table.begin(), table.end(), r,
                                       [](double x, const auto& knot) { return x < knot.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      return lo.second + (hi.second - lo.second) * (r - lo.first) / (hi.first - lo.first);
    }
  }
  return 0.0;
}

double RadialLaw::quantile(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile needs u in [0, 1)", {{"u", u}});
  switch (kind) {
    case Kind::ComplexGaussian: return std::sqrt(-std::log1p(-u));
    case Kind::UniformDisk: return std::sqrt(u);
    case Kind::TaylorLimit: return u;
    case Kind::Table: {
      validate_table(table);
      double lo = table.front().first;
      double hi = table.back().first;
      while (hi - lo > 1e-12 * std::max(hi, 1e-300)) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < u) lo = mid;
        else hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

RootEnsemble sample_radial_roots(const RadialLaw& law, std::size_t n, std::uint64_t seed) {
  if (law.kind == RadialLaw::Kind::Table) validate_table(law.table);
  SeededStream rng(seed);
  RootEnsemble out;
  out.provenance = Provenance::Sampled;
  out.seed = seed;
  out.roots.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = law.quantile(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    out.roots.push_back(std::polar(r, theta));
  }
  return out;
}

cplx cauchy_stieltjes(const RootEnsemble& ens, cplx z) {
  require_finite(z, "z");
  const double tol = kPoleTolerance * std::max(1.0, std::abs(z));
  ldc sum = 0;
  for (std::size_t k = 0; k < ens.roots.size(); ++k) {
    const cplx d = z - ens.roots[k];
    if (std::abs(d) <= tol) {
      throw Error(ErrorCode::PoleHit, "z coincides with a root", {{"index", k}, {"distance", std::abs(d)}});
    }
    sum += 1.0L / ldc(d);
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

cplx predicted_shift(const RootEnsemble& ens, std::size_t l) {
  if (l >= ens.roots.size()) {
    throw Error(ErrorCode::InvalidArgument, "root index out of range", {{"index", l}, {"size", ens.roots.size()}});
  }
  const cplx zl = ens.roots[l];
  const double tol = kPoleTolerance * std::max(1.0, std::abs(zl));
  ldc sum = 0;
  long double total = 0;
  for (std::size_t k = 0; k < ens.roots.size(); ++k) {
    if (k == l) continue;
    const cplx d = zl - ens.roots[k];
    if (std::abs(d) <= tol) {
      throw Error(ErrorCode::PoleHit, "root is not isolated", {{"index", l}, {"neighbor", k}});
    }
    sum += 1.0L / ldc(d);
    total += 1.0L / std::abs(ldc(d));
  }
  if (total == 0.0L || std::abs(sum) <= kPoleTolerance * total) {
    throw Error(ErrorCode::SumNearZero, "excluded Cauchy-Stieltjes sum vanishes",
                {{"index", l}, {"sum", static_cast<double>(std::abs(sum))}});
  }
  const ldc shift = 1.0L / sum;
  return zl - cplx(static_cast<double>(shift.real()), static_cast<double>(shift.imag()));
}

double circle_kernel_average(double r, double s) {
  if (!(r > 0.0) || !(s > 0.0) || !std::isfinite(r) || !std::isfinite(s)) {
    throw Error(ErrorCode::InvalidArgument, "r and s must be positive", {{"r", r}, {"s", s}});
  }
  if (std::fabs(r - s) <= 1e-12 * std::max(r, s)) {
    throw Error(ErrorCode::OnCircle, "r lies on the circle of radius s", {{"r", r}, {"s", s}});
  }
  return r < s ? 0.0 : 1.0 / r;
}

double circle_kernel_quadrature(double r, double s, std::size_t nodes) {
  circle_kernel_average(r, s);
  if (nodes == 0) throw Error(ErrorCode::InvalidArgument, "quadrature needs nodes");
  long double sum = 0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const long double t = 2.0L * std::numbers::pi_v<long double> * k / nodes;
    sum += (1.0L / (ldc(r) - ldc(s) * std::polar(1.0L, t))).real();
  }
  return static_cast<double>(sum / nodes);
}

void write_poly(std::ostream& out, const BigPoly& p) {
  out << p.degree() << ',' << p.bits() << '\n';
  for (const auto& c : p.coeffs()) out << c.re.to_hex() << ',' << c.im.to_hex() << '\n';
}

BigPoly read_poly(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, "polynomial file is empty");
  std::size_t degree = 0;
  long bits = 0;
  {
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::Io, "polynomial header must be 'degree,bits'");
    try {
      degree = std::stoul(line.substr(0, comma));
      bits = std::stol(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Io, "polynomial header must be 'degree,bits'", {{"line", line}});
    }
  }
  if (bits < 64) throw Error(ErrorCode::Io, "polynomial precision below 64 bits", {{"bits", bits}});
  std::vector<mp::Complex> c;
  c.reserve(degree + 1);
  for (std::size_t k = 0; k <= degree; ++k) {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::Io, "polynomial file ends early", {{"expected", degree + 1}, {"read", k}});
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::Io, "coefficient line must be 're,im'", {{"line", k + 2}});
    mp::Complex v(static_cast<mpfr_prec_t>(bits));
    v.re = mp::Real::from_hex(std::string_view(line).substr(0, comma), bits);
    v.im = mp::Real::from_hex(std::string_view(line).substr(comma + 1), bits);
    c.push_back(std::move(v));
  }
  return BigPoly(std::move(c));
}

void write_roots_csv(std::ostream& out, const RootEnsemble& ens) {
  out << "re,im\n";
  for (const cplx z : ens.roots) out << fmt::format("{:.17g},{:.17g}\n", z.real(), z.imag());
}

RootEnsemble read_roots_csv(std::istream& in, Provenance provenance) {
  RootEnsemble ens;
  ens.provenance = provenance;
  std::string line;
  if (!std::getline(in, line) || line != "re,im") {
    throw Error(ErrorCode::SchemaMismatch, "roots CSV must start with 're,im'", {{"header", line}});
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    double re = 0.0;
    double im = 0.0;
    char comma = 0;
    if (!(fields >> re >> comma >> im) || comma != ',') {
      throw Error(ErrorCode::Io, "malformed roots CSV row", {{"row", row}});
    }
    ens.roots.emplace_back(re, im);
  }
  return ens;
}

}  // namespace rootflow::poly
