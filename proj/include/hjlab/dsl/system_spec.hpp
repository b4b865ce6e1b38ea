#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjlab/expr/expr.hpp"

namespace hjlab {

struct CoordinateDecl {
  Atom coordinate;
  Atom velocity;
  Atom momentum;
  /// Bracket weight of (coordinate, momentum); 1/h^2 for lattice densities.
  ComplexRational weight{1};
  /// Set on the auto-generated partner of a complex coordinate.
  std::optional<Atom> conjugate_of;
};

struct SourceSpan {
  int line = 0;
  int column = 0;
};

class SpecError : public std::invalid_argument {
 public:
  enum class Kind { undeclared_atom, non_quadratic_velocity, duplicate_declaration, invalid };
  SpecError(Kind kind, const std::string& message);
  Kind kind;
};

/// A dynamical system ready for the Hamilton-Jacobi analysis.
struct SystemSpec {
  std::string name;
  std::vector<CoordinateDecl> coordinates;
  std::vector<Atom> parameters;
  Expr lagrangian;
  std::map<std::string, SourceSpan> source_spans;

  /// Adds a real coordinate with velocity "dot(name)" and momentum
  /// "p(name)" unless `momentum_name` is given.
  CoordinateDecl& add_coordinate(const std::string& name, const Site& site = {}, ComplexRational weight = 1,
                                 const std::string& momentum_name = {});
  /// Adds a complex coordinate and its independent conjugate partner
  /// "conj(name)"; returns {coordinate, partner}.
  std::pair<Atom, Atom> add_complex_coordinate(const std::string& name, const Site& site = {},
                                               ComplexRational weight = 1, const std::string& momentum_name = {},
                                               const std::string& conjugate_name = {},
                                               const std::string& conjugate_momentum_name = {});
  Atom add_parameter(const std::string& name);

  const CoordinateDecl* find_coordinate(Atom a) const;
  const CoordinateDecl* find_by_velocity(Atom v) const;
  std::vector<Atom> velocities() const;

  /// Enforces: the Lagrangian uses declared atoms only, velocities belong to
  /// declared coordinates, and the Lagrangian is at most quadratic in velocities.
  void validate() const;
};

/// Total degree of `e` in the velocity atoms (max over terms).
int velocity_degree(const Expr& e);

}  // namespace hjlab
