#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rootflow/grid.hpp"
#include "rootflow/polyroots.hpp"
#include "rootflow/radial_pde.hpp"

namespace rootflow::emp {

/// Coefficient models solved for roots, next to the sampled radial laws.
/// "taylor" is sum gamma_k z^k / k!, "taylor_quarter" sum gamma_k z^k / (k!)^(1/4).
bool is_coefficient_model(const std::string& dist);

struct ExperimentConfig {
  std::size_t n = 256;
  std::vector<double> t_grid{0.0, 0.25, 0.5};
  /// taylor, taylor_quarter, complex_gaussian, uniform_disk, taylor_limit or table
  std::string dist = "taylor";
  /// (radius, cdf) knots, only for dist == "table"
  std::vector<std::pair<double, double>> table;
  std::vector<std::uint64_t> seeds{1};
  std::size_t bins = 60;
  /// Histogram range and PDE grid. x_max = 0 picks a range that holds the law.
  double x_max = 0.0;
  std::size_t cells = 600;
  double cfl = 0.5;
  pde::Scheme scheme = pde::Scheme::Minmod;
  /// bits = 0 uses PrecisionPolicy::for_degree(n).
  poly::PrecisionPolicy policy{0, 0.0, 400};

  /// Fills x_max and the precision, then validates. Throws Config.
  ExperimentConfig resolved() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Number of derivatives taken for fraction t: floor(t n).
std::size_t derivative_count(double t, std::size_t n);

struct RadialHistogram {
  /// Uniform edges on [0, x_max], bins + 1 of them.
  std::vector<double> edges;
  /// Roots per bin divided by n_original.
  std::vector<double> masses;
  /// Mass of roots at or beyond x_max.
  double overflow = 0.0;
  double rescale = 1.0;

  double total() const;
  double bin_width() const { return edges[1] - edges[0]; }
};

/// Bins |z| / rescale; masses are normalized by n_original, not by the number
/// of roots, so after k derivatives the total is (n - k) / n.
RadialHistogram radial_histogram(const poly::RootEnsemble& ens, std::size_t n_original, std::size_t bins,
                                 double x_max, double rescale = 1.0);

/// Bin-wise mean of histograms with identical edges.
RadialHistogram mean_histogram(const std::vector<RadialHistogram>& hs);

struct CdfDistance {
  /// sup |H - P| of the cumulative masses
  double ks;
  /// int |H - P| dx
  double w1;
  /// total(H) - total(P)
  double mass_gap;
};

/// Histogram against a density. The histogram cumulative is piecewise linear
/// inside bins, overflow enters as a jump at x_max.
CdfDistance cdf_distance(const RadialHistogram& h, const pde::RadialDensity& psi);
/// Empirical radius distribution (each radius carries mass `weight`) against
/// a density.
CdfDistance cdf_distance(std::vector<double> radii, double weight, const pde::RadialDensity& psi);
CdfDistance cdf_distance(const pde::RadialDensity& a, const pde::RadialDensity& b);

/// Cell averages of a radial law on the grid, (F(x_{i+1}) - F(x_i)) / dx.
pde::RadialDensity law_density(const poly::RadialLaw& law, const RadialGrid& grid);

/// Roots of one trial after k derivatives, radii already divided by the
/// rescale factor of the model.
struct TrialSlice {
  std::uint64_t seed;
  double t;
  std::size_t derivatives;
  double rescale;
  poly::RootEnsemble roots;
  RadialHistogram histogram;
  std::optional<CdfDistance> metrics;
};

struct FlowSlice {
  double t;
  std::size_t derivatives;
  RadialHistogram mean;
  /// Mean histogram against the reference; empty without a reference.
  std::optional<CdfDistance> metrics;
  std::optional<double> median_w1;
  std::optional<double> median_ks;
  std::optional<pde::RadialDensity> reference;
};

struct FlowReport {
  ExperimentConfig config;
  /// Sorted by (seed, t).
  std::vector<TrialSlice> trials;
  std::vector<FlowSlice> slices;
};

/// Per trial: build p_n (random_taylor or poly_from_roots of sampled roots),
/// for each t differentiate floor(t n) times, find the roots, rescale and
/// histogram. Taylor radii are divided by the original n so the support is
/// [0, 1 - t]; the quarter model by n^(1/4); sampled laws are not rescaled.
/// The reference is evolve(psi0, t) with psi0 the law of the initial roots
/// (the indicator for taylor); taylor_quarter has none.
/// NoConvergence is rethrown with "seed" and "t" added to its details.
FlowReport run_flow_experiment(const ExperimentConfig& cfg, unsigned jobs = 1);

/// Writes config.json, metrics.csv, hist_t<k>.csv, trial_<seed>/roots_t<k>.csv
/// and trial_<seed>/hist_t<k>.csv into dir, k being the derivative count.
/// Returns the deterministic part of the summary.
nlohmann::json write_flow_report(const FlowReport& report, const std::filesystem::path& dir);

/// KS distance of the radii of random_taylor(n, seed), divided by n, to
/// F(r) = min(r, 1). policy.bits = 0 uses for_degree(n).
double kz_check(std::size_t n, std::uint64_t seed, poly::PrecisionPolicy policy = {0, 0.0, 400});
/// Exact KS distance of a sample to F(r) = min(r, 1).
double ks_uniform_radius(std::vector<double> radii);

struct RootPair {
  std::size_t root;
  std::size_t critical;
  double distance;
  /// |predicted_shift(root) - critical point|; empty when the prediction is
  /// undefined (SumNearZero, PoleHit).
  std::optional<double> shift_error;
};

struct PairingReport {
  std::vector<poly::cplx> roots;
  std::vector<poly::cplx> critical_points;
  std::vector<RootPair> pairs;
  std::size_t unpaired;
  double unpaired_modulus;
  double median_root_modulus;
  double median_pair_distance;
  /// "hungarian" up to 256 roots, "greedy" above
  std::string matching;
};

/// Matches the roots of p = prod (z - z_k) to the n - 1 roots of p' by
/// minimum total distance; the root left over is the unpaired one.
PairingReport pairing_check(const poly::RootEnsemble& ens, const poly::PrecisionPolicy& policy);

}  // namespace rootflow::emp
