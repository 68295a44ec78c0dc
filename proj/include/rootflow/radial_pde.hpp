#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rootflow/grid.hpp"

namespace rootflow::pde {

inline constexpr double kDefaultVacuum = 1e-10;
/// Largest Courant number accepted by `step`.
inline constexpr double kMaxCfl = 0.9;

/// Face reconstruction used by `step`. Upwind is the plain first-order donor
/// cell; Minmod adds a minmod-limited slope to the donor state, which keeps
/// the front of the indicator solution O(dx) wide instead of O(sqrt(dx)).
enum class Scheme { Upwind, Minmod };

/// Cell averages of the radial root density psi(t, .) on a grid.
struct RadialDensity {
  RadialGrid grid;
  std::vector<double> values;
  double time = 0.0;

  /// Validates sizes, finiteness and nonnegativity.
  RadialDensity(RadialGrid grid, std::vector<double> values, double time = 0.0);
};

/// A(x_i) = (1/x_i) * integral of psi over [0, x_i].
struct CumulativeAverage {
  RadialGrid grid;
  std::vector<double> values;
};

/// Radial transport speed v(x_i) = -1 / max(A(x_i), eps_vac).
struct VelocityField {
  RadialGrid grid;
  std::vector<double> values;
};

CumulativeAverage cumulative_average(const RadialDensity& psi);
VelocityField velocity(const CumulativeAverage& avg, double eps_vac = kDefaultVacuum);

struct StepResult {
  RadialDensity density;
  /// Flux through the origin face during the step (<= 0).
  double origin_flux;
};

/// One forward-Euler finite-volume step of d/dt psi = d/dx (psi / A).
/// The origin face always uses the first-order state, so the outflux is
/// exactly -1 while psi_0 > eps_vac. Outflow is capped at the cell content.
/// Throws StabilityViolation when dt exceeds kMaxCfl * dx * min A, the
/// minimum taken over cells that hold mass.
StepResult step(const RadialDensity& psi, double dt, double eps_vac = kDefaultVacuum,
                Scheme scheme = Scheme::Minmod);

/// Largest stable time step for the given Courant number.
double adaptive_dt(const RadialDensity& psi, double cfl, double eps_vac = kDefaultVacuum);

/// Instantaneous origin flux -psi_0 / max(psi_0, eps_vac).
double origin_flux(const RadialDensity& psi, double eps_vac = kDefaultVacuum);

struct MassSample {
  double t;
  double mass;
  double origin_flux;
};

struct Evolution {
  RadialDensity density;
  std::vector<MassSample> series;
};

/// Evolves psi0 to the absolute time t_end (psi0.time <= t_end < 1).
Evolution evolve(const RadialDensity& psi0, double t_end, double cfl, double eps_vac = kDefaultVacuum,
                 Scheme scheme = Scheme::Minmod);

Scheme scheme_from_name(std::string_view name);
std::string_view scheme_name(Scheme scheme);

/// psi(t, x) = 1 on [0, 1-t], 0 beyond, with the exact fractional average in
/// the cell that straddles 1-t.
RadialDensity indicator_solution(double t, const RadialGrid& grid);

/// x -> lambda * psi(lambda x), resampled by linear interpolation. Throws
/// DomainTooSmall when lambda < 1 would push more than 1e-12 of the mass
/// past x_max.
RadialDensity rescale(const RadialDensity& psi, double lambda);

double mass(const RadialDensity& psi);
double l1_distance(const RadialDensity& a, const RadialDensity& b);

/// Point samples of f at cell centers.
RadialDensity sample_profile(const RadialGrid& grid, const std::function<double(double)>& f);

/// Named initial radial profiles, each of unit mass:
///   indicator       1 on [0,1]
///   complex_gaussian 2 r exp(-r^2)
///   uniform_disk    2 r on [0,1]
///   bump            (15/8)(1 - r^2)^2 on [0,1]
RadialDensity initial_profile(std::string_view name, const RadialGrid& grid);
std::vector<std::string> profile_names();

}  // namespace rootflow::pde
