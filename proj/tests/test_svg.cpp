#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <optional>
#include <sstream>

#include "rootflow/errors.hpp"
#include "rootflow/svg.hpp"

using namespace rootflow;

namespace {

std::string render(std::string_view kind, const std::string& csv) {
  std::istringstream in(csv);
  return svg::render(kind, in);
}

std::optional<ErrorCode> code_of(std::string_view kind, const std::string& csv) {
  try {
    render(kind, csv);
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("nice_step picks the smallest covering 1-2-5 step") {
  CHECK(svg::nice_step(0.0, 1.0) == doctest::Approx(0.1));
  CHECK(svg::nice_step(0.0, 1.2) == doctest::Approx(0.2));
  CHECK(svg::nice_step(0.0, 7.0) == doctest::Approx(1.0));
  CHECK(svg::nice_step(-3.0, 3.0) == doctest::Approx(1.0));
  CHECK(svg::nice_step(0.0, 1000.0) == doctest::Approx(100.0));
  CHECK(svg::nice_step(0.0, 0.003) == doctest::Approx(0.0005));
}

TEST_CASE("axes have eleven ticks per side") {
  const auto s = render("scatter", "re,im\n0.5,-0.25\n");
  CHECK(s.rfind(R"(<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600")", 0) == 0);
  CHECK(count(s, "<line") == 22);
  CHECK(count(s, "<circle") == 1);
  // symmetric range [-0.5, 0.5] with step 0.1
  CHECK(s.find(">-0.5</text>") != std::string::npos);
  CHECK(s.find(">0.5</text>") != std::string::npos);
  CHECK(s.find(">0</text>") != std::string::npos);
}

TEST_CASE("histogram bars skip empty bins") {
  const auto s = render("histogram", "r_lo,r_hi,mass,density\n0,0.5,0.5,1\n0.5,1,0,0\n1,1.5,0.25,0.5\n");
  CHECK(count(s, R"(fill="#8ab")") == 2);
  const auto empty = render("histogram", "r_lo,r_hi,mass,density\n");
  CHECK(count(empty, R"(fill="#8ab")") == 0);
  CHECK(count(empty, "<line") == 22);
}

TEST_CASE("density step polyline merges equal runs") {
  const auto s = render("density", "x,psi\n0.25,1\n0.75,1\n1.25,0\n1.75,0\n");
  // faces 0, 0.5, 1, 1.5, 2 ; x axis 0..2, y axis 0..1
  CHECK(s.find(R"(<polyline points="70.00,30.00 420.00,30.00 420.00,550.00 770.00,550.00")") != std::string::npos);
}

TEST_CASE("mass series and degenerate ranges") {
  const auto s = render("mass_series", "t,mass,origin_flux\n0,1,1\n0.5,0.5,1\n");
  CHECK(count(s, "<polyline") == 1);
  const auto flat = render("mass_series", "t,mass,origin_flux\n0,1,0\n");
  CHECK(flat.find("nan") == std::string::npos);
  CHECK(flat.find("inf") == std::string::npos);
}

TEST_CASE("byte identical output") {
  const std::string csv = "re,im\n1e-3,2\n-1.5,0.75\n3,3\n";
  CHECK(render("scatter", csv) == render("scatter", csv));
}

TEST_CASE("schema mismatches") {
  CHECK(code_of("density", "r,psi\n") == ErrorCode::SchemaMismatch);
  CHECK(code_of("density", "x,psi\n1\n") == ErrorCode::SchemaMismatch);
  CHECK(code_of("density", "x,psi\n1,2,3\n") == ErrorCode::SchemaMismatch);
  CHECK(code_of("density", "x,psi\n1,abc\n") == ErrorCode::SchemaMismatch);
  CHECK(code_of("density", "x,psi\n1,nan\n") == ErrorCode::SchemaMismatch);
  CHECK(code_of("density", "") == ErrorCode::SchemaMismatch);
  CHECK(code_of("pie", "x\n") == ErrorCode::InvalidArgument);
  CHECK(svg::kinds().size() == 4);
}
