#pragma once

#include <optional>
#include <vector>

#include "hjlab/expr/expr.hpp"

namespace hjlab {

/// Canonical (coordinate, momentum) pairs with a positive bracket weight.
/// Weight 1 is ordinary mechanics; 1/h^2 realizes the lattice delta for field
/// densities on a grid of spacing h.
class CanonicalPairing {
 public:
  struct Pair {
    Atom coordinate;
    Atom momentum;
    ComplexRational weight;
  };

  /// Throws std::invalid_argument if either atom is already paired or the
  /// weight is not a positive rational.
  void add(Atom coordinate, Atom momentum, ComplexRational weight = 1);

  const std::vector<Pair>& pairs() const { return pairs_; }
  std::optional<Pair> find_by_coordinate(Atom q) const;
  std::optional<Pair> find_by_momentum(Atom p) const;
  /// Weight of the pair containing `a` (coordinate or momentum).
  std::optional<ComplexRational> weight_of(Atom a) const;

 private:
  std::vector<Pair> pairs_;
};

/// {f, g} = sum over pairs of w * (df/dq dg/dp - df/dp dg/dq).
Expr poisson_bracket(const Expr& f, const Expr& g, const CanonicalPairing& pairing);

}  // namespace hjlab
