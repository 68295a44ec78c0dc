#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace rootflow {

/// Seeded uniform stream with portable conversions. mt19937_64 output is fixed
/// by the standard; the conversions below avoid the implementation-defined
/// std distributions so sequences match across toolchains.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard complex Gaussian N_C(0,1): components N(0, 1/2), E|z|^2 = 1.
  /// Box-Muller on two uniforms.
  std::complex<double> complex_gaussian();

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer, used to derive per-case seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

}  // namespace rootflow
