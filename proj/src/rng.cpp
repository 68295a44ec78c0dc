#include "rootflow/rng.hpp"

#include <cmath>
#include <numbers>

namespace rootflow {

std::complex<double> SeededStream::complex_gaussian() {
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-std::log1p(-u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace rootflow
