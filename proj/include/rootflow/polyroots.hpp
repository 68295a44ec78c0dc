#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rootflow/mp.hpp"

namespace rootflow::poly {

using cplx = std::complex<double>;

struct PrecisionPolicy {
  long bits = 256;
  /// log2 of the relative residual accepted by find_roots; -bits/2 by default.
  double residual_log2 = -128.0;
  int max_iters = 400;

  static PrecisionPolicy with_bits(long bits);
  /// B = max(256, 4n).
  static PrecisionPolicy for_degree(std::size_t n);
  /// Throws Config unless bits >= 64, residual_log2 >= -bits/2, max_iters > 0.
  void validate() const;
};

/// Coefficients a_0..a_n at a common precision; a_n != 0.
class BigPoly {
 public:
  explicit BigPoly(std::vector<mp::Complex> coeffs);

  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  mpfr_prec_t bits() const noexcept { return coeffs_.front().precision(); }
  const std::vector<mp::Complex>& coeffs() const noexcept { return coeffs_; }
  const mp::Complex& coeff(std::size_t k) const { return coeffs_.at(k); }
  cplx coeff_double(std::size_t k) const { return coeffs_.at(k).to_complex(); }

 private:
  std::vector<mp::Complex> coeffs_;
};

enum class Provenance { Sampled, Solved, Rescaled };
std::string_view provenance_name(Provenance p);

/// Roots are kept in double precision; the working precision only matters
/// while they are computed.
struct RootEnsemble {
  std::vector<cplx> roots;
  Provenance provenance = Provenance::Sampled;
  std::optional<std::uint64_t> seed;
};

/// Monic product of (z - z_k) at policy.bits.
BigPoly poly_from_roots(const RootEnsemble& roots, const PrecisionPolicy& policy);

/// k-th derivative. Throws DegreeUnderflow when k > degree.
BigPoly differentiate(const BigPoly& p, std::size_t k);

/// Coefficients of p(lambda z), i.e. a_k lambda^k.
BigPoly scale_argument(const BigPoly& p, double lambda);

/// p(z) and p'(z) at the precision of p, rounded to double.
std::pair<cplx, cplx> evaluate(const BigPoly& p, cplx z);
/// p'(z) / p(z) at the precision of p.
cplx log_derivative(const BigPoly& p, cplx z);

/// Aberth-Ehrlich iteration. Trailing zero coefficients give exact zero
/// roots. Starting points come from the Newton polygon of log|a_k|: each hull
/// edge k_i -> k_j puts k_j - k_i points on a circle of radius
/// |a_{k_i} / a_{k_j}|^{1/(k_j - k_i)} at angles 2 pi q / (k_j - k_i) + 0.37 + k_i.
/// A long double pass brings the iterates close; the refinement at the
/// precision of p computes p/p' and the correction exactly and only the
/// repulsion sum in long double. Iteration is Jacobi style and a root is
/// frozen once |p(z)| <= 2^residual_log2 * sum |a_k||z|^k or its correction
/// is below 2^(-B/4) of the root radius (clusters).
/// Throws NoConvergence after max_iters refinement sweeps.
RootEnsemble find_roots(const BigPoly& p, const PrecisionPolicy& policy);

/// gamma_0..gamma_n, i.i.d. N_C(0,1) from SeededStream(seed). gamma_n is
/// redrawn while it is exactly zero.
std::vector<cplx> taylor_gaussians(std::size_t n, std::uint64_t seed);
/// sum gamma_k z^k / k!
BigPoly random_taylor(std::size_t n, std::uint64_t seed, const PrecisionPolicy& policy);

/// Radial law for sampled ensembles. For `Table`, (radius, cdf) knots define
/// a piecewise-linear CDF that must start at 0, be nondecreasing and end at 1.
struct RadialLaw {
  enum class Kind { ComplexGaussian, UniformDisk, TaylorLimit, Table };
  Kind kind = Kind::ComplexGaussian;
  std::vector<std::pair<double, double>> table;

  static RadialLaw named(std::string_view name);
  std::string name() const;
  /// Radial CDF.
  double cdf(double r) const;
  /// Inverse CDF; bisection to 1e-12 relative for tables.
  double quantile(double u) const;
};

/// Radius by inverse CDF, angle uniform on [0, 2 pi). Per root two uniforms
/// are drawn from SeededStream(seed): radius first, then angle.
RootEnsemble sample_radial_roots(const RadialLaw& law, std::size_t n, std::uint64_t seed);

/// Relative distance below which two points count as the same root.
inline constexpr double kPoleTolerance = 1e-12;

/// sum 1 / (z - z_k). Throws PoleHit when z is within kPoleTolerance (relative
/// to max(1, |z|)) of a root.
cplx cauchy_stieltjes(const RootEnsemble& ens, cplx z);

/// z_l - (sum_{k != l} 1/(z_l - z_k))^{-1}. Throws SumNearZero when the sum
/// cancels below kPoleTolerance of sum 1/|z_l - z_k|, PoleHit when z_l is not
/// isolated.
cplx predicted_shift(const RootEnsemble& ens, std::size_t l);

/// (1/2pi) int 1/(r - s e^{it}) dt = 0 for r < s, 1/r for r > s.
/// Throws OnCircle when |r - s| <= 1e-12 max(r, s).
double circle_kernel_average(double r, double s);
/// The same average by the trapezoid rule on `nodes` equispaced angles.
double circle_kernel_quadrature(double r, double s, std::size_t nodes = 10000);

/// Text format: "degree,bits" then one "re,im" hex-float pair per line for
/// a_0..a_n. Bit-exact round trip.
void write_poly(std::ostream& out, const BigPoly& p);
BigPoly read_poly(std::istream& in);

/// CSV "re,im" with 17 significant digits.
void write_roots_csv(std::ostream& out, const RootEnsemble& ens);
RootEnsemble read_roots_csv(std::istream& in, Provenance provenance);

}  // namespace rootflow::poly
