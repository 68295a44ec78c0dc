#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <utility>

#include <mpfr.h>

namespace rootflow::mp {

/// Owning wrapper around an mpfr_t. A moved-from Real holds no limbs and may
/// only be destroyed or assigned to.
class Real {
 public:
  explicit Real(mpfr_prec_t bits = 64) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  Real(double value, mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_d(v_, value, MPFR_RNDN); }
  Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  Real(Real&& other) noexcept {
    v_[0] = other.v_[0];
    other.v_[0]._mpfr_d = nullptr;
  }
  Real& operator=(const Real& other) {
    if (this != &other) {
      if (!live()) mpfr_init2(v_, mpfr_get_prec(other.v_));
      else mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& other) noexcept {
    if (this != &other) {
      std::swap(v_[0], other.v_[0]);
    }
    return *this;
  }
  ~Real() {
    if (live()) mpfr_clear(v_);
  }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  long double to_long_double() const noexcept { return mpfr_get_ld(v_, MPFR_RNDN); }
  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  /// log2 |x|, -inf for zero.
  double log2_abs() const noexcept;

  /// Hex-float text ("0x1.8p+3"), exact at the stored precision.
  std::string to_hex() const;
  static Real from_hex(std::string_view text, mpfr_prec_t bits);

 private:
  bool live() const noexcept { return v_[0]._mpfr_d != nullptr; }
  mpfr_t v_;
};

struct Complex {
  Real re;
  Real im;

  explicit Complex(mpfr_prec_t bits = 64) : re(bits), im(bits) {}
  Complex(double r, double i, mpfr_prec_t bits) : re(r, bits), im(i, bits) {}
  Complex(std::complex<double> z, mpfr_prec_t bits) : re(z.real(), bits), im(z.imag(), bits) {}

  mpfr_prec_t precision() const noexcept { return re.precision(); }
  bool is_zero() const noexcept { return re.is_zero() && im.is_zero(); }
  std::complex<double> to_complex() const noexcept { return {re.to_double(), im.to_double()}; }
  std::complex<long double> to_complex_ld() const noexcept {
    return {re.to_long_double(), im.to_long_double()};
  }
  void set(std::complex<long double> z) noexcept {
    mpfr_set_ld(re.get(), z.real(), MPFR_RNDN);
    mpfr_set_ld(im.get(), z.imag(), MPFR_RNDN);
  }
  void set(const Complex& z) noexcept {
    mpfr_set(re.get(), z.re.get(), MPFR_RNDN);
    mpfr_set(im.get(), z.im.get(), MPFR_RNDN);
  }
};

/// Scratch registers for complex arithmetic at a fixed precision. Results
/// must not alias the operands unless stated.
class Workspace {
 public:
  explicit Workspace(mpfr_prec_t bits) : t1_(bits), t2_(bits), t3_(bits), t4_(bits) {}

  /// out = a * b (out may alias neither a nor b)
  void mul(Complex& out, const Complex& a, const Complex& b);
  /// acc = acc * z + c, in place.
  void mul_add(Complex& acc, const Complex& z, const Complex& c);
  /// acc = acc * z, in place.
  void mul_inplace(Complex& acc, const Complex& z);
  /// out = a / b (out may alias neither a nor b)
  void div(Complex& out, const Complex& a, const Complex& b);
  /// out = 1 / b (out may not alias b)
  void inv(Complex& out, const Complex& b);

  /// |a| rounded to double precision. Fine for any exponent via log scale.
  double abs_log2(const Complex& a);

 private:
  Real t1_, t2_, t3_, t4_;
};

void add(Complex& out, const Complex& a, const Complex& b);
void sub(Complex& out, const Complex& a, const Complex& b);

}  // namespace rootflow::mp
