// Exercises the shared library through rootflow.h only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rootflow.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct DensityFree {
  void operator()(rf_density* p) const { rf_density_free(p); }
};
struct PolyFree {
  void operator()(rf_poly* p) const { rf_poly_free(p); }
};
struct RootsFree {
  void operator()(rf_roots* p) const { rf_roots_free(p); }
};
using Density = std::unique_ptr<rf_density, DensityFree>;
using Poly = std::unique_ptr<rf_poly, PolyFree>;
using Roots = std::unique_ptr<rf_roots, RootsFree>;

json take(char* s) {
  json j = json::parse(s);
  rf_string_free(s);
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::complex<double>> roots_of(const rf_roots* r) {
  std::vector<std::complex<double>> z(rf_roots_size(r));
  for (size_t i = 0; i < z.size(); ++i) {
    double re = 0, im = 0;
    REQUIRE(rf_roots_get(r, i, &re, &im) == RF_OK);
    z[i] = {re, im};
  }
  return z;
}

}  // namespace

TEST_CASE("status names and error state") {
  CHECK(std::string(rf_version()) == "0.1.0");
  CHECK(std::string(rf_status_name(RF_OK)) == "Ok");
  CHECK(std::string(rf_status_name(RF_E_NO_CONVERGENCE)) == "NoConvergence");
  CHECK(std::string(rf_status_name(RF_E_SCHEMA_MISMATCH)) == "SchemaMismatch");
  CHECK(rf_status_is_config(RF_E_CONFIG));
  CHECK(rf_status_is_config(RF_E_INVALID_ARGUMENT));
  CHECK_FALSE(rf_status_is_config(RF_E_NO_CONVERGENCE));

  rf_density* d = nullptr;
  CHECK(rf_density_profile("nope", 1.2, 100, &d) != RF_OK);
  CHECK(d == nullptr);
  CHECK(std::string(rf_last_error_message()).size() > 0);
  CHECK(json::parse(rf_last_error_json()).contains("error"));

  CHECK(rf_density_profile("indicator", 1.2, 100, nullptr) == RF_E_INVALID_ARGUMENT);
  CHECK(rf_density_profile(nullptr, 1.2, 100, &d) == RF_E_INVALID_ARGUMENT);

  // success resets the error state
  REQUIRE(rf_density_profile("indicator", 1.2, 100, &d) == RF_OK);
  rf_density_free(d);
  CHECK(std::string(rf_last_error_json()) == "null");

  // null handles are tolerated by accessors and free functions
  CHECK(rf_density_cells(nullptr) == 0);
  CHECK(rf_poly_degree(nullptr) == 0);
  CHECK(rf_roots_size(nullptr) == 0);
  rf_density_free(nullptr);
  rf_poly_free(nullptr);
  rf_roots_free(nullptr);
  rf_string_free(nullptr);
}

TEST_CASE("indicator evolution through the C API") {
  rf_density* raw = nullptr;
  REQUIRE(rf_density_profile("indicator", 1.2, 2000, &raw) == RF_OK);
  Density psi0(raw);
  CHECK(rf_density_mass(psi0.get()) == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(rf_density_evolve(psi0.get(), 0.5, 0.5, &raw) == RF_OK);
  Density psi(raw);
  CHECK(rf_density_time(psi.get()) == doctest::Approx(0.5));
  CHECK(std::abs(rf_density_mass(psi.get()) - 0.5) <= 0.01);

  REQUIRE(rf_density_indicator_solution(0.5, 1.2, 2000, &raw) == RF_OK);
  Density exact(raw);
  double l1 = -1.0;
  REQUIRE(rf_density_l1(psi.get(), exact.get(), &l1) == RF_OK);
  CHECK(l1 <= 0.006);

  std::vector<double> v(rf_density_cells(psi.get()));
  CHECK(rf_density_values(psi.get(), v.data(), v.size()) == 2000);
  CHECK(v.front() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rf_density_values(psi.get(), v.data(), 3) == 3);

  REQUIRE(rf_density_indicator_solution(0.5, 1.0, 10, &raw) == RF_OK);
  Density coarse(raw);
  CHECK(rf_density_l1(psi.get(), coarse.get(), &l1) == RF_E_INVALID_ARGUMENT);

  CHECK(rf_density_evolve(psi0.get(), 0.5, 2.0, &raw) == RF_E_INVALID_ARGUMENT);
  const double bad[3] = {1.0, -1.0, 0.0};
  CHECK(rf_density_from_values(1.0, bad, 3, &raw) != RF_OK);
}

TEST_CASE("polynomial round trip") {
  rf_roots* r = nullptr;
  REQUIRE(rf_roots_sample("complex_gaussian", 24, 5, &r) == RF_OK);
  Roots ens(r);
  CHECK(rf_roots_size(ens.get()) == 24);

  rf_poly* p = nullptr;
  REQUIRE(rf_poly_from_roots(ens.get(), 0, &p) == RF_OK);
  Poly poly(p);
  CHECK(rf_poly_degree(poly.get()) == 24);
  CHECK(rf_poly_bits(poly.get()) == 256);
  double re = 0, im = 0;
  REQUIRE(rf_poly_coeff(poly.get(), 24, &re, &im) == RF_OK);
  CHECK(re == 1.0);
  CHECK(im == 0.0);
  CHECK(rf_poly_coeff(poly.get(), 25, &re, &im) == RF_E_INVALID_ARGUMENT);

  REQUIRE(rf_poly_find_roots(poly.get(), 0, &r) == RF_OK);
  Roots found(r);
  const auto a = roots_of(ens.get()), b = roots_of(found.get());
  REQUIRE(b.size() == a.size());
  for (const auto& z : a) {
    double best = INFINITY;
    for (const auto& w : b) best = std::min(best, std::abs(z - w));
    CHECK(best <= 1e-9);
  }

  REQUIRE(rf_poly_differentiate(poly.get(), 24, &p) == RF_OK);
  Poly d24(p);
  CHECK(rf_poly_degree(d24.get()) == 0);
  CHECK(rf_poly_differentiate(poly.get(), 25, &p) == RF_E_DEGREE_UNDERFLOW);
  CHECK(rf_poly_find_roots(d24.get(), 0, &r) == RF_E_INVALID_ARGUMENT);
}

TEST_CASE("random Taylor and no convergence") {
  rf_poly* p = nullptr;
  REQUIRE(rf_poly_random_taylor(256, 3, 0, &p) == RF_OK);
  Poly poly(p);
  CHECK(rf_poly_degree(poly.get()) == 256);
  CHECK(rf_poly_bits(poly.get()) == 1024);
  rf_roots* r = nullptr;
  CHECK(rf_poly_find_roots(poly.get(), 1, &r) == RF_E_NO_CONVERGENCE);
  CHECK(r == nullptr);
  const auto e = json::parse(rf_last_error_json());
  CHECK(e["error"] == "NoConvergence");
  CHECK(e["details"].contains("worst_residual_log2"));
}

TEST_CASE("roots from arrays and circle kernel") {
  const double re[2] = {1.0, 1.0}, im[2] = {0.0, 0.0};
  rf_roots* r = nullptr;
  REQUIRE(rf_roots_from_arrays(re, im, 2, &r) == RF_OK);
  Roots two(r);
  double x = 0, y = 0;
  CHECK(rf_roots_get(two.get(), 2, &x, &y) == RF_E_INVALID_ARGUMENT);
  const double nan[1] = {NAN};
  CHECK(rf_roots_from_arrays(nan, im, 1, &r) == RF_E_INVALID_ARGUMENT);

  double v = 0;
  REQUIRE(rf_circle_kernel_average(2.0, 1.0, &v) == RF_OK);
  CHECK(v == doctest::Approx(0.5));
  REQUIRE(rf_circle_kernel_average(1.0, 2.0, &v) == RF_OK);
  CHECK(v == 0.0);
  CHECK(rf_circle_kernel_average(1.0, 1.0, &v) == RF_E_ON_CIRCLE);
}

TEST_CASE("configs and runs") {
  char* s = nullptr;
  REQUIRE(rf_default_config("pde", &s) == RF_OK);
  const auto d = take(s);
  CHECK(d["init"] == "indicator");
  CHECK(d["cells"] == 2000);
  CHECK(rf_default_config("fly", &s) == RF_E_CONFIG);

  REQUIRE(rf_canonicalize_config("pde", R"({"t": 0})", &s) == RF_OK);
  const auto c = take(s);
  CHECK(c["t"].is_number_float());
  CHECK(c["cells"] == 2000);
  CHECK(rf_canonicalize_config("pde", R"({"t": "x"})", &s) == RF_E_CONFIG);
  CHECK(rf_canonicalize_config("pde", "[1]", &s) == RF_E_CONFIG);
  CHECK(rf_canonicalize_config("pde", "{", &s) == RF_E_CONFIG);

  const auto dir = fs::temp_directory_path() / "rootflow_test_capi";
  fs::remove_all(dir);
  REQUIRE(rf_run("pde", R"({"cells": 300, "t": 0.25})", dir.string().c_str(), 1, 0, &s) == RF_OK);
  const auto summary = take(s);
  CHECK(std::abs(summary["mass"].get<double>() - 0.75) <= 0.01);
  CHECK(json::parse(slurp(dir / "summary.json")) == summary);
  CHECK(rf_run("pde", "{}", dir.string().c_str(), 1, 0, &s) == RF_E_CONFIG);
  CHECK(rf_run("pde", "{}", dir.string().c_str(), 1, 1, nullptr) == RF_OK);

  const auto svg = dir / "density.svg";
  REQUIRE(rf_render_svg("density", (dir / "density.csv").string().c_str(), svg.string().c_str()) == RF_OK);
  CHECK(slurp(svg).rfind("<svg", 0) == 0);
  CHECK(rf_render_svg("histogram", (dir / "density.csv").string().c_str(), svg.string().c_str()) ==
        RF_E_SCHEMA_MISMATCH);
  CHECK(rf_render_svg("density", (dir / "absent.csv").string().c_str(), svg.string().c_str()) == RF_E_IO);
}
