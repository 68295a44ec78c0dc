#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rootflow/grid.hpp"

namespace rootflow::linear {

/// Signed perturbation w around the constant state psi = 1, sampled at cell
/// centers. The last cell must be zero (compact support inside the grid).
struct Perturbation {
  RadialGrid grid;
  std::vector<double> values;

  Perturbation(RadialGrid grid, std::vector<double> values);

  /// Index of the last nonzero cell, 0 for w == 0.
  std::size_t support_end() const;
  bool mean_zero() const;
  /// dx * sum w_i^2
  double norm2() const;
};

/// Centered difference of w minus centered difference of (1/x) * int_0^x w,
/// one-sided in the first and last cell. In the first cell the derivative of
/// the average is w/x - W/x^2 with the same quadrature W.
std::vector<double> linearized_rhs(const Perturbation& w);

/// Classical RK4 on linearized_rhs with step dt (the last step is shortened to
/// land on t_end). The outermost cell is an inflow boundary and stays zero.
/// Throws StabilityViolation when dt > 0.5 dx.
Perturbation evolve_linearized(const Perturbation& w0, double t_end, double dt);

struct EnergyDerivative {
  /// 2 dx sum w_i rhs_i
  double direct;
  /// boundary_term - 2 hardy_bracket
  double decomposed;
  /// -w(0)^2 with w(0) = 1.5 w_0 - 0.5 w_1
  double boundary_term;
  /// dx sum (w_i^2 / x_i - w_i W_i / x_i^2)
  double hardy_bracket;
};

EnergyDerivative energy_derivative(const Perturbation& w);

struct HardyPair {
  double lhs;
  double rhs;
  double slack;
  /// 10 dx (L + max|g|) with L the largest slope of either integrand g between
  /// adjacent nonzero samples; max|g| covers a jump at the support end.
  double tol_quad;
  /// lhs restricted to [0, end of support of f]. Equal to lhs for the Lemma.
  double lhs_support;
};

/// int f(x)/x^2 (int_0^x f) dx <= int f(x)^2/x dx on the grid of f.
/// Throws NonIntegrable when the rhs near the origin keeps growing under
/// refinement (samples pooled to m/2 and m/4 cells; increments must shrink).
HardyPair hardy_pair(const RadialGrid& grid, const std::vector<double>& f);

/// int x^-r (int_0^x f)^p dx <= (p/(r-1))^p int x^-r (x f)^p dx for f >= 0.
/// lhs includes the exact tail beyond x_max, where int_0^x f is constant.
HardyPair generalized_hardy_pair(const RadialGrid& grid, const std::vector<double>& f, double p, double r);

/// Random piecewise-linear profile on [0, L], L in [0.2, 1], vanishing at 0
/// and L, with k = 1..6 equally spaced interior knots, so every slope is at
/// most 2 (k+1) / L. Values lie in [-1, 1], or [0, 1] when `nonnegative`.
std::vector<double> random_profile(const RadialGrid& grid, std::uint64_t seed, bool nonnegative);

/// Cosine series sum_{k=1..K} a_k cos(k pi x / L) on [0, L], L in [0.5, 1],
/// K = 2..4, a_k in [-1, 1] for k < K and a_K chosen so that w(L) = 0. The
/// result is projected to mean zero over the support, which only removes the
/// quadrature residue.
Perturbation random_mean_zero(const RadialGrid& grid, std::uint64_t seed);

struct CorpusRow {
  std::size_t case_id;
  std::uint64_t seed;
  double lhs;
  double rhs;
  double slack;
};

/// family: "lemma" or "generalized" (uses p, r). Case k uses mix_seed(seed, k).
std::vector<CorpusRow> hardy_corpus(const std::string& family, std::size_t cases, std::uint64_t seed,
                                    const RadialGrid& grid, double p = 2.0, double r = 3.0,
                                    unsigned jobs = 1);

struct EnergyRow {
  std::size_t case_id;
  std::uint64_t seed;
  double direct;
  double decomposed;
  double norm2;
};

std::vector<EnergyRow> energy_corpus(std::size_t cases, std::uint64_t seed, const RadialGrid& grid,
                                     unsigned jobs = 1);

}  // namespace rootflow::linear
