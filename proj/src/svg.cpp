#include "rootflow/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rootflow/errors.hpp"

namespace rootflow::svg {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 30.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;
constexpr int kDivisions = 10;

struct Table {
  std::vector<std::vector<double>> rows;
};

Error mismatch(std::string_view kind, const std::string& why, std::size_t line = 0) {
  nlohmann::json d = {{"kind", kind}};
  if (line) d["line"] = line;
  return Error(ErrorCode::SchemaMismatch, "cannot render " + std::string(kind) + ": " + why, std::move(d));
}

Table read_csv(std::string_view kind, std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw mismatch(kind, "expected header '" + std::string(header) + "'", 1);
  }
  const auto columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
  Table t;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      double v = 0.0;
      const char* first = line.data() + pos;
      const char* last = line.data() + comma;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || !std::isfinite(v)) throw mismatch(kind, "bad number", lineno);
      row.push_back(v);
      pos = comma + 1;
    }
    if (row.size() != columns) throw mismatch(kind, "wrong column count", lineno);
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct Axis {
  double lo, step;
  double hi() const { return lo + kDivisions * step; }
};

Axis make_axis(double lo, double hi) {
  if (!(hi > lo)) {
    // degenerate range: widen around the value
    const double c = lo;
    lo = c - (c == 0.0 ? 0.5 : 0.5 * std::fabs(c));
    hi = c + (c == 0.0 ? 0.5 : 0.5 * std::fabs(c));
  }
  const double s = nice_step(lo, hi);
  return {std::floor(lo / s) * s, s};
}

class Canvas {
 public:
  Canvas(Axis x, Axis y) : x_(x), y_(y) {}

  double px(double v) const { return kLeft + (v - x_.lo) / (x_.hi() - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const {
    return kHeight - kBottom - (v - y_.lo) / (y_.hi() - y_.lo) * (kHeight - kTop - kBottom);
  }

  void axes(std::string_view xlabel, std::string_view ylabel) {
    body_ += fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="none" stroke="#000"/>)"
                         "\n",
                         kLeft, kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom);
    for (int k = 0; k <= kDivisions; ++k) {
      const double xv = x_.lo + k * x_.step;
      const double yv = y_.lo + k * y_.step;
      body_ += fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="#000"/>)"
                           R"(<text x="{0:.2f}" y="{3:.2f}" font-size="12" text-anchor="middle">{4}</text>)"
                           "\n",
                           px(xv), kHeight - kBottom, kHeight - kBottom + 5.0, kHeight - kBottom + 20.0,
                           label(xv, x_.step));
      body_ += fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{2:.2f}" y2="{1:.2f}" stroke="#000"/>)"
                           R"(<text x="{3:.2f}" y="{4:.2f}" font-size="12" text-anchor="end">{5}</text>)"
                           "\n",
                           kLeft - 5.0, py(yv), kLeft, kLeft - 8.0, py(yv) + 4.0, label(yv, y_.step));
    }
    body_ += fmt::format(R"(<text x="{:.2f}" y="{:.2f}" font-size="14" text-anchor="middle">{}</text>)"
                         "\n",
                         0.5 * (kLeft + kWidth - kRight), kHeight - 10.0, xlabel);
    body_ += fmt::format(
        R"svg(<text x="15" y="{0:.2f}" font-size="14" text-anchor="middle" transform="rotate(-90 15 {0:.2f})">{1}</text>)svg"
        "\n",
        0.5 * (kTop + kHeight - kBottom), ylabel);
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view color) {
    if (pts.empty()) return;
    std::string p;
    for (auto [x, y] : pts) p += fmt::format("{}{:.2f},{:.2f}", p.empty() ? "" : " ", px(x), py(y));
    body_ += fmt::format(R"(<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>)"
                         "\n",
                         p, color);
  }

  void bar(double x0, double x1, double h) {
    const double top = py(std::max(h, 0.0));
    body_ += fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="#8ab" stroke="#246"/>)"
                         "\n",
                         px(x0), top, px(x1) - px(x0), py(y_.lo) - top);
  }

  void dot(double x, double y) {
    body_ += fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="1.5" fill="#246"/>)"
                         "\n",
                         px(x), py(y));
  }

  std::string finish() const {
    return fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}">)"
                       "\n"
                       R"(<rect width="{0}" height="{1}" fill="#fff"/>)"
                       "\n{2}</svg>\n",
                       static_cast<int>(kWidth), static_cast<int>(kHeight), body_);
  }

 private:
  static std::string label(double v, double step) {
    if (std::fabs(v) < 1e-9 * step) v = 0.0;
    return fmt::format("{:.6g}", v);
  }

  Axis x_, y_;
  std::string body_;
};

std::pair<double, double> range(const Table& t, std::size_t col, double lo, double hi) {
  for (const auto& r : t.rows) {
    lo = std::min(lo, r[col]);
    hi = std::max(hi, r[col]);
  }
  return {lo, hi};
}

std::string density(std::istream& in) {
  const auto t = read_csv("density", in, "x,psi");
  if (t.rows.empty()) {
    Canvas c(make_axis(0.0, 1.0), make_axis(0.0, 1.0));
    c.axes("x", "psi");
    return c.finish();
  }
  // cell centers: faces halfway between, the first face at 0
  const std::size_t m = t.rows.size();
  std::vector<double> faces(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) faces[i + 1] = 2.0 * t.rows[i][0] - faces[i];
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = t.rows[i][1];
    if (!pts.empty() && pts.back().second == v) {
      pts.back().first = faces[i + 1];
      continue;
    }
    pts.push_back({faces[i], v});
    pts.push_back({faces[i + 1], v});
  }
  const auto [ylo, yhi] = range(t, 1, 0.0, 0.0);
  Canvas c(make_axis(0.0, faces[m]), make_axis(ylo, yhi));
  c.axes("x", "psi");
  c.polyline(pts, "#c30");
  return c.finish();
}

std::string histogram(std::istream& in) {
  const auto t = read_csv("histogram", in, "r_lo,r_hi,mass,density");
  double xhi = 1.0, yhi = 0.0;
  for (const auto& r : t.rows) {
    xhi = std::max(xhi, r[1]);
    yhi = std::max(yhi, r[3]);
  }
  if (yhi == 0.0) yhi = 1.0;
  Canvas c(make_axis(0.0, xhi), make_axis(0.0, yhi));
  c.axes("r", "density");
  for (const auto& r : t.rows) {
    if (r[3] > 0.0) c.bar(r[0], r[1], r[3]);
  }
  return c.finish();
}

std::string scatter(std::istream& in) {
  const auto t = read_csv("scatter", in, "re,im");
  double extent = 0.0;
  for (const auto& r : t.rows) extent = std::max({extent, std::fabs(r[0]), std::fabs(r[1])});
  if (extent == 0.0) extent = 1.0;
  const Axis a = make_axis(-extent, extent);
  Canvas c(a, a);
  c.axes("Re z", "Im z");
  for (const auto& r : t.rows) c.dot(r[0], r[1]);
  return c.finish();
}

std::string mass_series(std::istream& in) {
  const auto t = read_csv("mass_series", in, "t,mass,origin_flux");
  const auto [tlo, thi] = range(t, 0, 0.0, t.rows.empty() ? 1.0 : 0.0);
  const auto [mlo, mhi] = range(t, 1, 0.0, t.rows.empty() ? 1.0 : 0.0);
  Canvas c(make_axis(tlo, thi), make_axis(mlo, mhi));
  c.axes("t", "mass");
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : t.rows) pts.push_back({r[0], r[1]});
  c.polyline(pts, "#c30");
  return c.finish();
}

}  // namespace

std::vector<std::string> kinds() { return {"density", "histogram", "scatter", "mass_series"}; }

double nice_step(double lo, double hi) {
  const double raw = (hi - lo) / kDivisions;
  double s = std::pow(10.0, std::floor(std::log10(raw)));
  for (;;) {
    for (double f : {1.0, 2.0, 5.0}) {
      if (std::floor(lo / (f * s)) * (f * s) + kDivisions * f * s >= hi) return f * s;
    }
    s *= 10.0;
  }
}

std::string render(std::string_view kind, std::istream& csv) {
  if (kind == "density") return density(csv);
  if (kind == "histogram") return histogram(csv);
  if (kind == "scatter") return scatter(csv);
  if (kind == "mass_series") return mass_series(csv);
  throw Error(ErrorCode::InvalidArgument, "unknown render kind '" + std::string(kind) + "'");
}

}  // namespace rootflow::svg
