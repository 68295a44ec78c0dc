#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rootflow/errors.hpp"
#include "rootflow/linear_stability.hpp"

using namespace rootflow;
using namespace rootflow::linear;

namespace {

template <class F>
std::vector<double> sample(const RadialGrid& g, F f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.center(i));
  return v;
}

std::vector<double> ramp(const RadialGrid& g) {
  return sample(g, [](double x) { return x < 1.0 ? x : 0.0; });
}

// composite Simpson on [a, b] with n (even) intervals
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int k = 1; k < n; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return sum * h / 3.0;
}

const RadialGrid kFine(2.0, 4096);

}  // namespace

TEST_CASE("perturbation validation") {
  RadialGrid g(1.0, 10);
  CHECK_THROWS_AS(Perturbation(g, std::vector<double>(9, 0.0)), Error);
  std::vector<double> v(10, 0.0);
  v.back() = 1.0;
  CHECK_THROWS_AS(Perturbation(g, v), Error);
  v.back() = 0.0;
  v[3] = 2.0;
  Perturbation w(g, v);
  CHECK(w.support_end() == 3);
  CHECK_FALSE(w.mean_zero());
  CHECK(w.norm2() == doctest::Approx(0.4));
}

TEST_CASE("linearized rhs examples") {
  RadialGrid g(2.0, 400);
  SUBCASE("zero") {
    for (double r : linearized_rhs(Perturbation(g, std::vector<double>(400, 0.0)))) CHECK(r == 0.0);
  }
  SUBCASE("w = x gives 1/2 away from the boundary cells") {
    const auto rhs = linearized_rhs(Perturbation(g, ramp(g)));
    for (std::size_t i = 20; i < 180; ++i) CHECK(rhs[i] == doctest::Approx(0.5).epsilon(1e-3));
  }
  SUBCASE("constant gives 0 in the interior") {
    const auto rhs = linearized_rhs(Perturbation(g, sample(g, [](double x) { return x < 1.0 ? 0.7 : 0.0; })));
    for (std::size_t i = 1; i < 190; ++i) CHECK(std::fabs(rhs[i]) <= 1e-9);
  }
}

TEST_CASE("evolve_linearized") {
  RadialGrid g(2.0, 512);
  const auto w0 = random_mean_zero(g, 99);
  SUBCASE("zero stays zero") {
    const auto w = evolve_linearized(Perturbation(g, std::vector<double>(512, 0.0)), 0.3, 0.4 * g.dx());
    for (double v : w.values) CHECK(v == 0.0);
  }
  SUBCASE("t_end = 0 is the identity") {
    CHECK(evolve_linearized(w0, 0.0, 0.4 * g.dx()).values == w0.values);
  }
  SUBCASE("CFL breach") {
    try {
      evolve_linearized(w0, 0.1, 0.6 * g.dx());
      FAIL("expected StabilityViolation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StabilityViolation);
    }
  }
  SUBCASE("a pure transport bump moves left at unit speed") {
    // far from the origin the nonlocal term is small, the bulk moves with w_x
    RadialGrid wide(4.0, 2000);
    const auto bump = sample(wide, [](double x) {
      const double d = (x - 3.0) / 0.2;
      return std::fabs(d) < 1.0 ? std::pow(1.0 - d * d, 3) : 0.0;
    });
    const auto w = evolve_linearized(Perturbation(wide, bump), 0.5, 0.4 * wide.dx());
    const auto peak = std::max_element(w.values.begin(), w.values.end()) - w.values.begin();
    CHECK(wide.center(static_cast<std::size_t>(peak)) == doctest::Approx(2.5).epsilon(0.01));
  }
}

TEST_CASE("energy derivative examples") {
  SUBCASE("zero") {
    const auto e = energy_derivative(Perturbation(kFine, std::vector<double>(kFine.size(), 0.0)));
    CHECK(e.direct == 0.0);
    CHECK(e.decomposed == 0.0);
    CHECK(e.boundary_term == 0.0);
    CHECK(e.hardy_bracket == 0.0);
  }
  SUBCASE("sin(2 pi x) on [0,1] against a Simpson oracle") {
    const double two_pi = 2.0 * std::numbers::pi;
    const Perturbation w(kFine, sample(kFine, [&](double x) { return x < 1.0 ? std::sin(two_pi * x) : 0.0; }));
    auto integrand = [&](double x) {
      if (x == 0.0) return 0.0;
      const double v = std::sin(two_pi * x);
      const double big_w = (1.0 - std::cos(two_pi * x)) / two_pi;
      return v * (v / x - big_w / (x * x));
    };
    const double bracket = simpson(integrand, 0.0, 1.0, 200000);
    const double norm2 = w.norm2();
    const auto e = energy_derivative(w);
    CHECK(e.direct <= 0.0);
    CHECK(std::fabs(e.direct - e.decomposed) <= 1e-3 * norm2);
    // w(0) = 0, so the exact derivative is -2 * bracket
    CHECK(std::fabs(e.direct + 2.0 * bracket) <= 1e-3 * norm2);
    CHECK(std::fabs(e.hardy_bracket - bracket) <= 1e-3 * norm2);
  }
  SUBCASE("w = x on [0,1] has bracket 1/4") {
    const auto e = energy_derivative(Perturbation(kFine, ramp(kFine)));
    CHECK(e.hardy_bracket == doctest::Approx(0.25).epsilon(1e-5));
  }
}

TEST_CASE("Hardy Lemma examples") {
  SUBCASE("f = 0 is the equality case") {
    const auto h = hardy_pair(kFine, std::vector<double>(kFine.size(), 0.0));
    CHECK(h.lhs == 0.0);
    CHECK(h.rhs == 0.0);
    CHECK(h.slack == 0.0);
  }
  SUBCASE("f = x on [0,1] gives (1/4, 1/2)") {
    const auto h = hardy_pair(kFine, ramp(kFine));
    CHECK(std::fabs(h.lhs - 0.25) <= 1e-4 * 0.25);
    CHECK(std::fabs(h.rhs - 0.5) <= 1e-4 * 0.5);
    CHECK(h.slack == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(h.tol_quad > 0.0);
    CHECK(h.lhs_support == h.lhs);
  }
  SUBCASE("f = x(1-x) on [0,1] gives (1/18, 1/12)") {
    const auto h = hardy_pair(kFine, sample(kFine, [](double x) { return x < 1.0 ? x * (1.0 - x) : 0.0; }));
    CHECK(h.lhs == doctest::Approx(1.0 / 18.0).epsilon(1e-4));
    CHECK(h.rhs == doctest::Approx(1.0 / 12.0).epsilon(1e-4));
    CHECK(h.slack > 0.0);
  }
  SUBCASE("f(0) != 0 is not integrable") {
    try {
      hardy_pair(kFine, sample(kFine, [](double x) { return x < 1.0 ? 1.0 : 0.0; }));
      FAIL("expected NonIntegrable");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonIntegrable);
    }
  }
}

TEST_CASE("generalized Hardy examples") {
  SUBCASE("f = 0") {
    const auto h = generalized_hardy_pair(kFine, std::vector<double>(kFine.size(), 0.0), 2.0, 3.0);
    CHECK(h.lhs == 0.0);
    CHECK(h.rhs == 0.0);
  }
  SUBCASE("f = x on [0,1], (p,r) = (2,3)") {
    const auto h = generalized_hardy_pair(kFine, ramp(kFine), 2.0, 3.0);
    CHECK(std::fabs(h.lhs_support - 0.125) <= 1e-4 * 0.125);
    CHECK(std::fabs(h.rhs - 0.5) <= 1e-4 * 0.5);
    // over the whole half line the inner integral stays 1/2 past x = 1
    CHECK(std::fabs(h.lhs - 0.25) <= 1e-4 * 0.25);
  }
  SUBCASE("bad exponents") {
    for (auto [p, r] : {std::pair{1.0, 3.0}, {2.0, 1.0}, {0.5, 0.5}}) {
      try {
        generalized_hardy_pair(kFine, ramp(kFine), p, r);
        FAIL("expected BadExponents");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadExponents);
      }
    }
  }
  SUBCASE("negative f is rejected") {
    auto f = ramp(kFine);
    f[10] = -1.0;
    CHECK_THROWS_AS(generalized_hardy_pair(kFine, f, 2.0, 3.0), Error);
  }
}

TEST_CASE("property: random profiles are admissible") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto f = random_profile(kFine, s, true);
    CHECK(*std::min_element(f.begin(), f.end()) >= 0.0);
    CHECK(f.back() == 0.0);
    // vanishes linearly at the origin with slope at most 2 * 7 / 0.2
    CHECK(f[0] <= 70.0 * kFine.center(0));
    const auto w = random_mean_zero(kFine, s);
    CHECK(w.mean_zero());
  }
}

TEST_CASE("property: Hardy corpora have nonnegative slack") {
  for (const char* family : {"lemma", "generalized"}) {
    const auto rows = hardy_corpus(family, 1000, 17, kFine);
    for (const auto& r : rows) CHECK(r.slack >= -1e-8 * r.rhs);
  }
  for (auto [p, r] : {std::pair{2.0, 2.5}, {3.0, 3.0}}) {
    const auto rows = hardy_corpus("generalized", 1000, 17, kFine, p, r);
    for (const auto& row : rows) CHECK(row.slack >= -1e-8 * row.rhs);
  }
}

TEST_CASE("property: linearized energy decreases and matches its decomposition") {
  const auto rows = energy_corpus(1000, 23, kFine);
  for (const auto& r : rows) {
    CHECK(r.direct <= 1e-6 * r.norm2);
    CHECK(std::fabs(r.direct - r.decomposed) <= 1e-3 * r.norm2);
  }
}

TEST_CASE("property: decomposition gap shrinks under refinement") {
  double previous = 0.0;
  for (std::size_t m : {1024u, 2048u, 4096u}) {
    RadialGrid g(2.0, m);
    double worst = 0.0;
    for (const auto& r : energy_corpus(200, 5, g)) worst = std::max(worst, std::fabs(r.direct - r.decomposed) / r.norm2);
    if (previous > 0.0) CHECK(worst < previous);
    previous = worst;
  }
}

TEST_CASE("property: L2 norm is nonincreasing along the linearized flow") {
  RadialGrid g(2.0, 1024);
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto w = random_mean_zero(g, s);
    const double start = w.norm2();
    double previous = start;
    for (int k = 0; k < 10; ++k) {
      w = evolve_linearized(w, 0.05, 0.4 * g.dx());
      const double now = w.norm2();
      CHECK(now <= previous + 1e-6 * start);
      previous = now;
    }
  }
}
