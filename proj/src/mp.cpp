#include "rootflow/mp.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "rootflow/errors.hpp"

namespace rootflow::mp {

double Real::log2_abs() const noexcept {
  if (mpfr_zero_p(v_)) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  const double mant = mpfr_get_d_2exp(&exp, v_, MPFR_RNDN);
  return std::log2(std::fabs(mant)) + static_cast<double>(exp);
}

std::string Real::to_hex() const {
  char* raw = nullptr;
  if (mpfr_asprintf(&raw, "%Ra", v_) < 0 || raw == nullptr) {
    throw Error(ErrorCode::Io, "mpfr_asprintf failed");
  }
  std::unique_ptr<char, decltype(&mpfr_free_str)> owned(raw, &mpfr_free_str);
  return std::string(raw);
}

Real Real::from_hex(std::string_view text, mpfr_prec_t bits) {
  Real out(bits);
  const std::string buf(text);
  char* end = nullptr;
  mpfr_strtofr(out.get(), buf.c_str(), &end, 0, MPFR_RNDN);
  if (end == buf.c_str() || *end != '\0') {
    throw Error(ErrorCode::Io, "malformed hex-float '" + buf + "'");
  }
  return out;
}

void Workspace::mul(Complex& out, const Complex& a, const Complex& b) {
  mpfr_mul(t1_.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(t2_.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(t3_.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(t4_.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  mpfr_sub(out.re.get(), t1_.get(), t2_.get(), MPFR_RNDN);
  mpfr_add(out.im.get(), t3_.get(), t4_.get(), MPFR_RNDN);
}

void Workspace::mul_add(Complex& acc, const Complex& z, const Complex& c) {
  mpfr_mul(t1_.get(), acc.re.get(), z.re.get(), MPFR_RNDN);
  mpfr_mul(t2_.get(), acc.im.get(), z.im.get(), MPFR_RNDN);
  mpfr_mul(t3_.get(), acc.re.get(), z.im.get(), MPFR_RNDN);
  mpfr_mul(t4_.get(), acc.im.get(), z.re.get(), MPFR_RNDN);
  mpfr_sub(t1_.get(), t1_.get(), t2_.get(), MPFR_RNDN);
  mpfr_add(t3_.get(), t3_.get(), t4_.get(), MPFR_RNDN);
  mpfr_add(acc.re.get(), t1_.get(), c.re.get(), MPFR_RNDN);
  mpfr_add(acc.im.get(), t3_.get(), c.im.get(), MPFR_RNDN);
}

void Workspace::mul_inplace(Complex& acc, const Complex& z) {
  mpfr_mul(t1_.get(), acc.re.get(), z.re.get(), MPFR_RNDN);
  mpfr_mul(t2_.get(), acc.im.get(), z.im.get(), MPFR_RNDN);
  mpfr_mul(t3_.get(), acc.re.get(), z.im.get(), MPFR_RNDN);
  mpfr_mul(t4_.get(), acc.im.get(), z.re.get(), MPFR_RNDN);
  mpfr_sub(acc.re.get(), t1_.get(), t2_.get(), MPFR_RNDN);
  mpfr_add(acc.im.get(), t3_.get(), t4_.get(), MPFR_RNDN);
}

void Workspace::inv(Complex& out, const Complex& b) {
  // 1/b = conj(b) / |b|^2
  mpfr_sqr(t1_.get(), b.re.get(), MPFR_RNDN);
  mpfr_sqr(t2_.get(), b.im.get(), MPFR_RNDN);
  mpfr_add(t1_.get(), t1_.get(), t2_.get(), MPFR_RNDN);
  mpfr_ui_div(t1_.get(), 1, t1_.get(), MPFR_RNDN);
  mpfr_mul(out.re.get(), b.re.get(), t1_.get(), MPFR_RNDN);
  mpfr_mul(out.im.get(), b.im.get(), t1_.get(), MPFR_RNDN);
  mpfr_neg(out.im.get(), out.im.get(), MPFR_RNDN);
}

void Workspace::div(Complex& out, const Complex& a, const Complex& b) {
  mpfr_sqr(t1_.get(), b.re.get(), MPFR_RNDN);
  mpfr_sqr(t2_.get(), b.im.get(), MPFR_RNDN);
  mpfr_add(t1_.get(), t1_.get(), t2_.get(), MPFR_RNDN);
  // numerator a * conj(b)
  mpfr_mul(t2_.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(t3_.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_add(t2_.get(), t2_.get(), t3_.get(), MPFR_RNDN);
  mpfr_mul(t3_.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(t4_.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_sub(t3_.get(), t3_.get(), t4_.get(), MPFR_RNDN);
  mpfr_div(out.re.get(), t2_.get(), t1_.get(), MPFR_RNDN);
  mpfr_div(out.im.get(), t3_.get(), t1_.get(), MPFR_RNDN);
}

double Workspace::abs_log2(const Complex& a) {
  const double lr = a.re.log2_abs();
  const double li = a.im.log2_abs();
  if (std::isinf(lr) && std::isinf(li)) return -std::numeric_limits<double>::infinity();
  const double hi = std::max(lr, li);
  const double lo = std::min(lr, li);
  return hi + 0.5 * std::log2(1.0 + std::exp2(2.0 * (lo - hi)));
}

void add(Complex& out, const Complex& a, const Complex& b) {
  mpfr_add(out.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_add(out.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
}

void sub(Complex& out, const Complex& a, const Complex& b) {
  mpfr_sub(out.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_sub(out.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
}

}  // namespace rootflow::mp
