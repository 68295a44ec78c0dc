#include "rootflow/grid.hpp"

#include <cmath>
#include <string>

#include "rootflow/errors.hpp"

namespace rootflow {

RadialGrid::RadialGrid(double x_max, std::size_t cells) : x_max_(x_max), cells_(cells), dx_(0.0) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) {
    throw Error(ErrorCode::InvalidArgument, "grid x_max must be positive and finite",
                {{"x_max", x_max}});
  }
  if (cells == 0) {
    throw Error(ErrorCode::InvalidArgument, "grid needs at least one cell");
  }
  dx_ = x_max / static_cast<double>(cells);
}

std::vector<double> RadialGrid::centers() const {
  std::vector<double> out(cells_);
  for (std::size_t i = 0; i < cells_; ++i) out[i] = center(i);
  return out;
}

std::vector<double> cumulative_integral(const RadialGrid& grid, std::span<const double> f) {
  require_grid_size(grid, f, "cumulative_integral input");
  std::vector<double> out(f.size());
  double running = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = grid.dx() * (running + 0.5 * f[i]);
    running += f[i];
  }
  return out;
}

void require_grid_size(const RadialGrid& grid, std::span<const double> values, const char* what) {
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + ": expected " + std::to_string(grid.size()) + " values, got " +
                    std::to_string(values.size()));
  }
}

}  // namespace rootflow
