#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

namespace hjlab {

/// Exact complex number re + i*im with arbitrary-precision rational parts.
/// Both parts are kept canonical (mpq_class reduces and normalizes signs).
class ComplexRational {
 public:
  ComplexRational() = default;
  ComplexRational(long value) : re_(value) {}  // NOLINT(implicit)
  ComplexRational(mpq_class re, mpq_class im = 0);

  static ComplexRational fraction(long num, long den);
  static ComplexRational imaginary_unit() { return {0, 1}; }
  /// Exact binary value of a double (e.g. 0.5 -> 1/2).
  static ComplexRational from_double(double value);

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  ComplexRational conj() const { return {re_, -im_}; }
  /// Throws std::domain_error on zero.
  ComplexRational inverse() const;
  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  ComplexRational operator-() const { return {-re_, -im_}; }
  ComplexRational& operator+=(const ComplexRational& o);
  ComplexRational& operator-=(const ComplexRational& o);
  ComplexRational& operator*=(const ComplexRational& o);
  ComplexRational& operator/=(const ComplexRational& o) { return *this *= o.inverse(); }

  friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
  friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
  friend ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }
  friend ComplexRational operator/(ComplexRational a, const ComplexRational& b) { return a /= b; }
  friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  /// Deterministic text: "3/2", "-i", "2*i", "(1/2-3*i)".
  std::string str() const;

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

}  // namespace hjlab
