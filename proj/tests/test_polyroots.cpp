#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rootflow/errors.hpp"
#include "rootflow/matching.hpp"
#include "rootflow/polyroots.hpp"
#include "rootflow/rng.hpp"

using namespace rootflow;
using namespace rootflow::poly;

namespace {

const PrecisionPolicy k256 = PrecisionPolicy::with_bits(256);

RootEnsemble ens(std::vector<cplx> roots) { return RootEnsemble{std::move(roots), Provenance::Sampled, {}}; }

BigPoly from_doubles(const std::vector<cplx>& c, long bits = 256) {
  std::vector<mp::Complex> v;
  for (auto z : c) v.emplace_back(z, bits);
  return BigPoly(std::move(v));
}

void check_coeffs(const BigPoly& p, const std::vector<cplx>& expected) {
  REQUIRE(p.degree() + 1 == expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    CHECK(std::abs(p.coeff_double(k) - expected[k]) <= 1e-14 * (1.0 + std::abs(expected[k])));
  }
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (auto z : v) m = std::max(m, std::abs(z));
  return m;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

const cplx I{0.0, 1.0};

}  // namespace

TEST_CASE("precision policy") {
  CHECK(PrecisionPolicy::for_degree(10).bits == 256);
  CHECK(PrecisionPolicy::for_degree(512).bits == 2048);
  CHECK(PrecisionPolicy::with_bits(512).residual_log2 == -256.0);
  PrecisionPolicy p;
  p.bits = 32;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::Config);
  p = PrecisionPolicy::with_bits(256);
  p.residual_log2 = -200.0;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::Config);
  p.residual_log2 = -128.0;
  p.max_iters = 0;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::Config);
}

TEST_CASE("poly_from_roots examples") {
  check_coeffs(poly_from_roots(ens({1.0, -1.0}), k256), {-1.0, 0.0, 1.0});
  check_coeffs(poly_from_roots(ens({}), k256), {1.0});
  check_coeffs(poly_from_roots(ens({I, -I}), k256), {1.0, 0.0, 1.0});
  CHECK(poly_from_roots(ens({1.0, 2.0}), k256).bits() == 256);
  CHECK_THROWS_AS(poly_from_roots(ens({cplx(NAN, 0.0)}), k256), Error);
}

TEST_CASE("differentiate examples") {
  const auto cube = from_doubles({0.0, 0.0, 0.0, 1.0});
  check_coeffs(differentiate(cube, 2), {0.0, 6.0});
  check_coeffs(differentiate(cube, 0), {0.0, 0.0, 0.0, 1.0});
  check_coeffs(differentiate(cube, 3), {6.0});
  CHECK(code_of([&] { differentiate(cube, 4); }) == ErrorCode::DegreeUnderflow);

  SUBCASE("random Taylor derivative shifts the gamma sequence") {
    const std::size_t n = 40;
    const auto gamma = taylor_gaussians(n, 5);
    const auto d = differentiate(random_taylor(n, 5, k256), 1);
    REQUIRE(d.degree() == n - 1);
    double factorial = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) factorial *= static_cast<double>(k);
      const cplx expected = gamma[k + 1] / factorial;
      CHECK(std::abs(d.coeff_double(k) - expected) <= 1e-14 * std::abs(expected));
    }
  }
}

TEST_CASE("differentiation commutes with scaling") {
  // lambda = 2 keeps every product exact, so the coefficients agree bit for bit
  const auto p = random_taylor(30, 11, k256);
  for (std::size_t k : {1u, 5u, 17u}) {
    const auto lhs = differentiate(scale_argument(p, 2.0), k);
    const auto rhs = scale_argument(differentiate(p, k), 2.0);
    REQUIRE(lhs.degree() == rhs.degree());
    for (std::size_t j = 0; j <= lhs.degree(); ++j) {
      mp::Complex scaled(rhs.bits());
      mpfr_mul_2ui(scaled.re.get(), rhs.coeff(j).re.get(), k, MPFR_RNDN);
      mpfr_mul_2ui(scaled.im.get(), rhs.coeff(j).im.get(), k, MPFR_RNDN);
      CHECK(mpfr_equal_p(lhs.coeff(j).re.get(), scaled.re.get()));
      CHECK(mpfr_equal_p(lhs.coeff(j).im.get(), scaled.im.get()));
    }
  }
}

TEST_CASE("evaluate and log_derivative") {
  const auto p = from_doubles({-1.0, 0.0, 1.0});
  auto [v, dv] = evaluate(p, 3.0);
  CHECK(v == cplx(8.0));
  CHECK(dv == cplx(6.0));
  CHECK(std::abs(log_derivative(p, 3.0) - 0.75) <= 1e-15);
  CHECK(code_of([&] { log_derivative(p, 1.0); }) == ErrorCode::PoleHit);
}

TEST_CASE("find_roots examples") {
  auto sorted = [](std::vector<cplx> v) {
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
    return v;
  };
  SUBCASE("z^2 + 1") {
    const auto r = find_roots(from_doubles({1.0, 0.0, 1.0}), k256);
    CHECK(r.provenance == Provenance::Solved);
    CHECK(matching_distance(r.roots, {I, -I}) <= 1e-15);
  }
  SUBCASE("(z-1)(z-2)(z-3)") {
    const auto r = sorted(find_roots(from_doubles({-6.0, 11.0, -6.0, 1.0}), k256).roots);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(r[k] - cplx(k + 1.0)) <= 1e-15);
  }
  SUBCASE("trailing zeros give exact zero roots") {
    const auto r = sorted(find_roots(from_doubles({0.0, 0.0, -1.0, 0.0, 1.0}), k256).roots);
    REQUIRE(r.size() == 4);
    CHECK(std::count(r.begin(), r.end(), cplx(0.0)) == 2);
    CHECK(std::abs(r.front() + 1.0) <= 1e-15);
    CHECK(std::abs(r.back() - 1.0) <= 1e-15);
  }
  SUBCASE("a double root counts twice") {
    const auto r = find_roots(from_doubles({1.0, -2.0, 1.0}), k256);
    REQUIRE(r.roots.size() == 2);
    for (auto z : r.roots) CHECK(std::abs(z - 1.0) <= 1e-12);
  }
  SUBCASE("degree 0 is rejected") {
    CHECK_THROWS_AS(find_roots(from_doubles({1.0}), k256), Error);
  }
  SUBCASE("NoConvergence carries the iteration count") {
    auto policy = PrecisionPolicy::with_bits(2048);
    policy.max_iters = 1;
    try {
      find_roots(random_taylor(64, 3, policy), policy);
      FAIL("expected NoConvergence");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoConvergence);
      CHECK(e.details().at("iterations") == 1);
      CHECK(e.details().contains("worst_residual_log2"));
    }
  }
}

TEST_CASE("property: round trip at B = 512") {
  const auto policy = PrecisionPolicy::with_bits(512);
  for (std::uint64_t k = 0; k < 40; ++k) {
    const auto law = RadialLaw::named(k % 2 ? "uniform_disk" : "complex_gaussian");
    const std::size_t n = k % 4 == 3 ? 128 : 64;
    const auto s = sample_radial_roots(law, n, mix_seed(101, k));
    const auto r = find_roots(poly_from_roots(s, policy), policy);
    REQUIRE(r.roots.size() == n);
    CHECK(matching_distance(s.roots, r.roots) <= 1e-6 * max_abs(s.roots));
  }
}

TEST_CASE("property: derivative roots stay inside the root radius") {
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto s = sample_radial_roots(RadialLaw::named("taylor_limit"), 48, mix_seed(7, k));
    const auto p = poly_from_roots(s, k256);
    const auto r1 = find_roots(differentiate(p, 1), k256);
    CHECK(r1.roots.size() == 47);
    CHECK(max_abs(r1.roots) <= max_abs(s.roots) + 1e-8);
  }
  const auto policy = PrecisionPolicy::for_degree(128);
  const auto p = random_taylor(128, 9, policy);
  const double outer = max_abs(find_roots(p, policy).roots);
  CHECK(max_abs(find_roots(differentiate(p, 64), policy).roots) <= outer + 1e-8);
}

TEST_CASE("random_taylor") {
  const auto a = random_taylor(50, 4, k256);
  const auto b = random_taylor(50, 4, k256);
  CHECK(a.degree() == 50);
  for (std::size_t k = 0; k <= 50; ++k) {
    CHECK(mpfr_equal_p(a.coeff(k).re.get(), b.coeff(k).re.get()));
    CHECK(mpfr_equal_p(a.coeff(k).im.get(), b.coeff(k).im.get()));
  }
  CHECK(code_of([] { random_taylor(0, 1, k256); }) == ErrorCode::InvalidArgument);

  const auto gamma = taylor_gaussians(4095, 2024);
  double second = 0.0;
  for (auto g : gamma) second += std::norm(g);
  second /= static_cast<double>(gamma.size());
  CHECK(second >= 0.95);
  CHECK(second <= 1.05);
}

TEST_CASE("sample_radial_roots") {
  SUBCASE("complex Gaussian has E r^2 = 1") {
    const auto s = sample_radial_roots(RadialLaw::named("complex_gaussian"), 100000, 8);
    double m = 0.0;
    for (auto z : s.roots) m += std::norm(z);
    m /= 1e5;
    CHECK(m >= 0.98);
    CHECK(m <= 1.02);
  }
  SUBCASE("taylor_limit radii are uniform") {
    const auto s = sample_radial_roots(RadialLaw::named("taylor_limit"), 100000, 8);
    std::vector<double> r;
    for (auto z : s.roots) r.push_back(std::abs(z));
    std::sort(r.begin(), r.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double lo = static_cast<double>(i) / 1e5;
      const double hi = static_cast<double>(i + 1) / 1e5;
      ks = std::max({ks, std::fabs(r[i] - lo), std::fabs(r[i] - hi)});
    }
    CHECK(ks <= 0.01);
  }
  SUBCASE("uniform disk quantile") {
    const auto law = RadialLaw::named("uniform_disk");
    CHECK(law.quantile(0.25) == doctest::Approx(0.5));
    CHECK(law.cdf(0.5) == doctest::Approx(0.25));
  }
  SUBCASE("n = 0 and determinism") {
    CHECK(sample_radial_roots(RadialLaw::named("uniform_disk"), 0, 1).roots.empty());
    CHECK(sample_radial_roots(RadialLaw::named("uniform_disk"), 20, 1).roots ==
          sample_radial_roots(RadialLaw::named("uniform_disk"), 20, 1).roots);
  }
  SUBCASE("tables") {
    RadialLaw law;
    law.kind = RadialLaw::Kind::Table;
    law.table = {{0.0, 0.0}, {1.0, 0.5}, {3.0, 1.0}};
    CHECK(law.quantile(0.75) == doctest::Approx(2.0).epsilon(1e-12));
    for (auto z : sample_radial_roots(law, 200, 3).roots) CHECK(std::abs(z) <= 3.0);
    law.table = {{0.0, 0.0}, {1.0, 0.7}, {2.0, 0.6}, {3.0, 1.0}};
    CHECK(code_of([&] { sample_radial_roots(law, 10, 1); }) == ErrorCode::BadTable);
    law.table = {{0.0, 0.0}, {1.0, 0.9}};
    CHECK(code_of([&] { sample_radial_roots(law, 10, 1); }) == ErrorCode::BadTable);
  }
  CHECK(code_of([] { RadialLaw::named("cauchy"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("cauchy_stieltjes") {
  CHECK(cauchy_stieltjes(ens({0.0}), 2.0) == cplx(0.5));
  CHECK(std::abs(cauchy_stieltjes(ens({1.0, -1.0}), 0.0)) == 0.0);
  CHECK(code_of([] { cauchy_stieltjes(ens({1.0, -1.0}), 1.0); }) == ErrorCode::PoleHit);

  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto s = sample_radial_roots(RadialLaw::named("complex_gaussian"), 32, mix_seed(55, k));
    const auto p = poly_from_roots(s, k256);
    SeededStream rng(k);
    for (int j = 0; j < 5; ++j) {
      const cplx z(4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0);
      const cplx exact = log_derivative(p, z);
      CHECK(std::abs(exact - cauchy_stieltjes(s, z)) <= 1e-8 * std::abs(exact));
    }
  }
}

TEST_CASE("predicted_shift") {
  SUBCASE("two roots: the first-order model overshoots") {
    CHECK(predicted_shift(ens({1.0, -1.0}), 0) == cplx(-1.0));
  }
  SUBCASE("roots of unity: closed form z (n-3)/(n-1)") {
    for (std::size_t n : {32u, 64u, 128u}) {
      std::vector<cplx> u;
      for (std::size_t k = 0; k < n; ++k) u.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / n));
      const double f = (n - 3.0) / (n - 1.0);
      for (std::size_t l : {0u, 5u}) CHECK(std::abs(predicted_shift(ens(u), l) - f * u[l]) <= 1e-13);
    }
  }
  SUBCASE("random radial ensembles: relative prediction error falls like 1/n") {
    double previous = 0.0;
    for (std::size_t n : {32u, 64u, 128u}) {
      std::vector<double> err, shift;
      const auto policy = PrecisionPolicy::for_degree(n);
      for (std::uint64_t s = 0; s < 3; ++s) {
        const auto e = sample_radial_roots(RadialLaw::named("taylor_limit"), n, mix_seed(3, s));
        const auto crit = find_roots(differentiate(poly_from_roots(e, policy), 1), policy);
        for (std::size_t l = 0; l < n; ++l) {
          const cplx z = predicted_shift(e, l);
          double best = INFINITY;
          for (auto c : crit.roots) best = std::min(best, std::abs(z - c));
          err.push_back(best);
          shift.push_back(std::abs(z - e.roots[l]));
        }
      }
      const double ratio = median(err) / median(shift);
      if (previous > 0.0) CHECK(ratio <= 0.75 * previous);
      previous = ratio;
    }
  }
  SUBCASE("a far outlier moves by about distance / (n - 1)") {
    auto roots = sample_radial_roots(RadialLaw::named("uniform_disk"), 63, 12).roots;
    roots.push_back(10.0);
    const cplx z = predicted_shift(ens(roots), 63);
    const double expected = 10.0 / 63.0;
    CHECK(std::fabs(std::abs(z - 10.0) - expected) <= 0.1 * expected);
    const auto crit = find_roots(differentiate(poly_from_roots(ens(roots), k256), 1), k256);
    double best = INFINITY;
    for (auto c : crit.roots) best = std::min(best, std::abs(z - c));
    CHECK(best <= 0.1 * expected);
  }
  SUBCASE("errors") {
    CHECK(code_of([] { predicted_shift(ens({1.0, 1.0, 2.0}), 0); }) == ErrorCode::PoleHit);
    CHECK(code_of([] { predicted_shift(ens({0.0, 1.0, -1.0}), 0); }) == ErrorCode::SumNearZero);
    CHECK(code_of([] { predicted_shift(ens({0.0}), 1); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("circle kernel") {
  CHECK(circle_kernel_average(2.0, 1.0) == 0.5);
  CHECK(circle_kernel_average(1.0, 2.0) == 0.0);
  for (auto [r, s] : {std::pair{2.0, 1.0}, {1.0, 2.0}, {3.0, 2.9}}) {
    CHECK(std::fabs(circle_kernel_quadrature(r, s) - circle_kernel_average(r, s)) <= 1e-8);
  }
  CHECK(code_of([] { circle_kernel_average(1.0, 1.0); }) == ErrorCode::OnCircle);
  CHECK(code_of([] { circle_kernel_average(-1.0, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("serialization") {
  SUBCASE("polynomials round trip bit for bit") {
    const auto p = random_taylor(20, 6, PrecisionPolicy::with_bits(300));
    std::stringstream io;
    write_poly(io, p);
    const auto q = read_poly(io);
    CHECK(q.degree() == 20);
    CHECK(q.bits() == 300);
    for (std::size_t k = 0; k <= 20; ++k) {
      CHECK(mpfr_equal_p(p.coeff(k).re.get(), q.coeff(k).re.get()));
      CHECK(mpfr_equal_p(p.coeff(k).im.get(), q.coeff(k).im.get()));
    }
  }
  SUBCASE("malformed polynomial files") {
    for (const char* text : {"", "3\n", "1,256\n0x1p+0,0x0p+0\n", "1,256\nzz,0\n0x1p+0,0\n"}) {
      std::istringstream in(text);
      CHECK(code_of([&] { read_poly(in); }) == ErrorCode::Io);
    }
  }
  SUBCASE("roots CSV round trip") {
    const auto s = sample_radial_roots(RadialLaw::named("complex_gaussian"), 30, 2);
    std::stringstream io;
    write_roots_csv(io, s);
    CHECK(io.str().rfind("re,im\n", 0) == 0);
    const auto t = read_roots_csv(io, Provenance::Rescaled);
    CHECK(t.roots == s.roots);
    CHECK(t.provenance == Provenance::Rescaled);
    std::istringstream bad("x,y\n1,2\n");
    CHECK(code_of([&] { read_roots_csv(bad, Provenance::Sampled); }) == ErrorCode::SchemaMismatch);
  }
}

TEST_CASE("matching") {
  CHECK(matching_distance({}, {}) == 0.0);
  CHECK(matching_distance({0.0, 1.0}, {1.1, 0.1}) == doctest::Approx(0.1));
  const std::vector<cplx> a{0.0, 1.3}, b{0.6, -0.5};
  CHECK(matching_distance(a, b) == doctest::Approx(0.7));
  const std::vector<double> cost{1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 3.0, 6.0, 9.0};
  const auto sigma = assignment(cost, 3);
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) total += cost[i * 3 + sigma[i]];
  CHECK(total == 10.0);
  CHECK_THROWS_AS(matching_distance({0.0}, {}), Error);
}
