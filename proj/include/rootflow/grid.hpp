#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rootflow {

/// Uniform cell-centered grid on (0, x_max]. Cell i spans [i*dx, (i+1)*dx]
/// with center (i + 1/2)*dx, so no center sits on the origin.
class RadialGrid {
 public:
  RadialGrid(double x_max, std::size_t cells);

  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return cells_; }
  double dx() const noexcept { return dx_; }
  double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * dx_; }
  /// Left face of cell i; face(size()) == x_max.
  double face(std::size_t i) const noexcept { return static_cast<double>(i) * dx_; }
  std::vector<double> centers() const;

  friend bool operator==(const RadialGrid& a, const RadialGrid& b) noexcept {
    return a.x_max_ == b.x_max_ && a.cells_ == b.cells_;
  }

 private:
  double x_max_;
  std::size_t cells_;
  double dx_;
};

/// Midpoint cumulative quadrature shared by every module:
/// out[i] = dx * (sum_{j<i} f[j] + f[i]/2), an approximation of the integral
/// of f over [0, x_i].
std::vector<double> cumulative_integral(const RadialGrid& grid, std::span<const double> f);

/// Throws InvalidArgument unless `values.size() == grid.size()`.
void require_grid_size(const RadialGrid& grid, std::span<const double> values, const char* what);

}  // namespace rootflow
