#pragma once

#include <complex>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hjlab/expr/atom.hpp"
#include "hjlab/expr/complex_rational.hpp"

namespace hjlab {

/// Product of atom powers, sorted by atom id, no zero exponents.
/// Negative exponents occur only for invertible atoms (parameters, exponentials).
using Monomial = std::vector<std::pair<Atom::Id, int>>;

/// Graded lexicographic order over atom declaration order: higher total
/// degree first, then the larger exponent of the earliest-declared atom.
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

int total_degree(const Monomial& m);

class RecursiveBinding : public std::invalid_argument {
 public:
  explicit RecursiveBinding(const Atom& atom);
};

class UnboundAtom : public std::invalid_argument {
 public:
  explicit UnboundAtom(const Atom& atom);
  Atom atom;
};

/// Exact symbolic expression: a canonical sum of coefficient * monomial terms
/// over complex rationals. Always stored normalized (no zero coefficients, no
/// duplicate monomials), so structural equality is mathematical equality.
class Expr {
 public:
  using Terms = std::map<Monomial, ComplexRational, MonomialOrder>;

  Expr() = default;
  Expr(ComplexRational constant);  // NOLINT(implicit)
  Expr(long constant) : Expr(ComplexRational(constant)) {}  // NOLINT(implicit)
  Expr(Atom atom);  // NOLINT(implicit)

  /// Builds from arbitrary (possibly unsorted, repeated) term data.
  static Expr from_terms(const std::vector<std::pair<ComplexRational, std::vector<std::pair<Atom, int>>>>& terms);
  static Expr term(ComplexRational coefficient, Monomial monomial);
  static Expr i() { return Expr(ComplexRational::imaginary_unit()); }

  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Coefficient of the empty monomial (zero if absent).
  ComplexRational constant_term() const;
  /// Single term made only of invertible atoms with a nonzero coefficient.
  bool is_invertible() const;
  /// Throws std::domain_error unless is_invertible().
  Expr inverse() const;

  /// Atoms appearing in monomials (not inside exponential arguments).
  std::set<Atom> atoms() const;
  /// True if the value depends on `a`, including through exponential atoms.
  bool depends_on(Atom a) const;
  /// Highest exponent of `a` over all terms (0 when absent).
  int degree_in(Atom a) const;

  Expr operator-() const;
  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Expr& o);
  friend Expr operator+(Expr a, const Expr& b) { return a += b; }
  friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
  friend Expr operator*(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b) { return a.terms_ == b.terms_; }

  Expr pow(unsigned exponent) const;

  /// Deterministic debug text: sorted monomials, explicit rational
  /// coefficients, `i` literal, e.g. "-1/2*kappa*A2[0,0] + pi1[0,0]".
  std::string str() const;

 private:
  void add_term(const Monomial& m, const ComplexRational& c);
  Terms terms_;
};

/// Canonical form. Expr is stored canonically, so this is the identity; kept
/// as the named entry point of the algebra.
inline Expr normalize(const Expr& e) { return e; }
inline bool is_zero(const Expr& e) { return e.is_zero(); }

Expr differentiate(const Expr& e, Atom a);

/// Simultaneous substitution. Throws RecursiveBinding when a target refers to
/// its own atom, std::invalid_argument when a bound atom sits inside an
/// exponential argument or appears with a negative power and a
/// non-invertible target.
Expr substitute(const Expr& e, const std::map<Atom, Expr>& bindings);

using Assignment = std::map<Atom, std::complex<double>>;

/// Floating evaluation. Exponential atoms without an explicit value are
/// computed from their argument. Throws UnboundAtom.
std::complex<double> evaluate(const Expr& e, const Assignment& values);

}  // namespace hjlab
