#include "hjlab/expr/poisson.hpp"

#include <stdexcept>

namespace hjlab {

void CanonicalPairing::add(Atom coordinate, Atom momentum, ComplexRational weight) {
  if (!weight.is_real() || sgn(weight.re()) <= 0) {
    throw std::invalid_argument("pair weight must be a positive rational");
  }
  for (const auto& p : pairs_) {
    for (Atom a : {coordinate, momentum}) {
      if (p.coordinate == a || p.momentum == a) {
        throw std::invalid_argument("atom " + a.display() + " already paired");
      }
    }
  }
  if (coordinate == momentum) throw std::invalid_argument("atom paired with itself");
  pairs_.push_back({coordinate, momentum, std::move(weight)});
}

std::optional<CanonicalPairing::Pair> CanonicalPairing::find_by_coordinate(Atom q) const {
  for (const auto& p : pairs_) {
    if (p.coordinate == q) return p;
  }
  return std::nullopt;
}

std::optional<CanonicalPairing::Pair> CanonicalPairing::find_by_momentum(Atom m) const {
  for (const auto& p : pairs_) {
    if (p.momentum == m) return p;
  }
  return std::nullopt;
}

std::optional<ComplexRational> CanonicalPairing::weight_of(Atom a) const {
  for (const auto& p : pairs_) {
    if (p.coordinate == a || p.momentum == a) return p.weight;
  }
  return std::nullopt;
}

namespace {

// Atoms a value can depend on, including parents of exponential atoms.
std::set<Atom> dependency_set(const Expr& e) {
  std::set<Atom> out;
  for (Atom a : e.atoms()) {
    out.insert(a);
    if (const Expr* arg = a.exponent_argument()) {
      auto inner = dependency_set(*arg);
      out.insert(inner.begin(), inner.end());
    }
  }
  return out;
}

}  // namespace

Expr poisson_bracket(const Expr& f, const Expr& g, const CanonicalPairing& pairing) {
  if (f.is_zero() || g.is_zero()) return {};
  const auto fd = dependency_set(f);
  const auto gd = dependency_set(g);
  Expr out;
  for (const auto& pair : pairing.pairs()) {
    const bool fq = fd.contains(pair.coordinate), fp = fd.contains(pair.momentum);
    const bool gq = gd.contains(pair.coordinate), gp = gd.contains(pair.momentum);
    Expr term;
    if (fq && gp) term += differentiate(f, pair.coordinate) * differentiate(g, pair.momentum);
    if (fp && gq) term -= differentiate(f, pair.momentum) * differentiate(g, pair.coordinate);
    if (!term.is_zero()) out += Expr(pair.weight) * term;
  }
  return out;
}

}  // namespace hjlab
