#include "hjlab/expr/complex_rational.hpp"

#include <stdexcept>

namespace hjlab {

ComplexRational::ComplexRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

ComplexRational ComplexRational::fraction(long num, long den) {
  if (den == 0) throw std::domain_error("zero denominator");
  return {mpq_class(num, den)};
}

ComplexRational ComplexRational::from_double(double value) { return {mpq_class(value)}; }

ComplexRational ComplexRational::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero");
  mpq_class norm = re_ * re_ + im_ * im_;
  return {re_ / norm, -im_ / norm};
}

ComplexRational& ComplexRational::operator+=(const ComplexRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

ComplexRational& ComplexRational::operator-=(const ComplexRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

ComplexRational& ComplexRational::operator*=(const ComplexRational& o) {
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

std::string ComplexRational::str() const {
  if (is_real()) return re_.get_str();
  if (sgn(re_) == 0) {
    if (im_ == 1) return "i";
    if (im_ == -1) return "-i";
    return im_.get_str() + "*i";
  }
  std::string out = "(" + re_.get_str();
  if (sgn(im_) > 0) out += "+";
  if (im_ == 1) out += "i";
  else if (im_ == -1) out += "-i";
  else out += im_.get_str() + "*i";
  return out + ")";
}

}  // namespace hjlab
