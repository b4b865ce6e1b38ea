#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjlab/dsl/system_spec.hpp"
#include "hjlab/expr/linear_solve.hpp"
#include "hjlab/expr/poisson.hpp"

namespace hjlab::hj {

/// A velocity survived the Legendre transform (internal consistency failure).
class ResidualVelocity : public std::logic_error {
 public:
  explicit ResidualVelocity(const std::string& where, const Expr& e);
};

class ClosureLimitExceeded : public std::runtime_error {
 public:
  explicit ClosureLimitExceeded(std::size_t passes);
};

/// Momentum density p_q = w_q * dL/d(qdot) for every coordinate, in
/// declaration order.
std::map<Atom, Expr> compute_momenta(const SystemSpec& spec);

struct HessianSplit {
  std::size_t rank = 0;
  ExprMatrix hessian;
  /// Indices into spec.coordinates.
  std::vector<std::size_t> regular;   // velocities solved for (the a-sector)
  std::vector<std::size_t> singular;  // coordinates promoted to parameters t_mu
  /// velocity atom -> w_a(q, p, params) for the regular sector.
  std::map<Atom, Expr> solved_velocities;
  std::vector<std::string> assumptions;
};

HessianSplit hessian_split(const SystemSpec& spec);

/// H0 = p_a w_a + p_mu qdot_mu|_{p_mu = -H_mu} - L(qdot_a = w_a), in total
/// (not density) momenta. Throws ResidualVelocity.
Expr build_h0(const SystemSpec& spec, const HessianSplit& split);

struct Hamiltonian {
  std::string name;    // "H'0", "H'1", ...
  Atom parameter;      // t_alpha: the time atom or a singular coordinate
  Atom momentum;       // p_alpha
  Expr expr;           // H'_alpha = p_alpha + H_alpha
  ComplexRational weight{1};  // bracket weight of (t_alpha, p_alpha)
};

struct HJSystem {
  SystemSpec spec;
  HessianSplit split;
  Atom time;
  Atom time_momentum;
  Expr h0;
  /// hamiltonians[alpha] belongs to parameter t_alpha; index 0 is time.
  std::vector<Hamiltonian> hamiltonians;
  CanonicalPairing pairing;
  std::vector<std::string> assumptions;

  std::size_t parameter_count() const { return hamiltonians.size(); }
  /// H'_alpha / w_alpha: the generator of the flow along t_alpha.
  Expr generator(std::size_t alpha) const;
  /// H_alpha = H'_alpha - p_alpha.
  Expr h_alpha(std::size_t alpha) const;
  /// Every atom the analysis can print (for parsing reports back).
  std::vector<Atom> atoms() const;
};

HJSystem build_hprimes(const SystemSpec& spec, const HessianSplit& split, const Expr& h0);

/// Convenience: compute_momenta/hessian_split/build_h0/build_hprimes.
HJSystem build_system(const SystemSpec& spec);

/// dX = sum_alpha coefficient_alpha dt_alpha.
struct TotalDifferential {
  Atom variable;
  std::vector<std::pair<std::size_t, Expr>> terms;  // (alpha, coefficient)

  Expr coefficient(std::size_t alpha) const;
};

struct EquationsOfMotion {
  std::vector<TotalDifferential> equations;
  /// dz = sum_alpha (-H_alpha + p_a dH'_alpha/dp_a) dt_alpha
  std::vector<std::pair<std::size_t, Expr>> action;

  const TotalDifferential* find(Atom variable) const;
};

EquationsOfMotion derive_eom(const HJSystem& hj);

enum class Origin { primary, secondary };
enum class Classification { pending, generates_constraint, fixes_differential, identically_zero };

std::string_view to_string(Origin o);
std::string_view to_string(Classification c);

struct ConstraintRecord {
  std::string name;
  Expr expr;
  Origin origin = Origin::primary;
  std::string parent;          // for secondary constraints
  Classification classification = Classification::pending;
  std::optional<std::size_t> fixed_parameter;          // alpha of the fixed dt
  std::vector<std::pair<std::size_t, Expr>> solved;    // d t_fixed = sum coeff dt_alpha
  std::string generated;       // name of the constraint this one generated
};

struct ClosureOptions {
  std::size_t max_passes = 0;  // 0 -> 10 * number of coordinates
  std::vector<std::string> assume_nonzero;
};

struct ClosureResult {
  std::vector<ConstraintRecord> records;
  std::vector<std::string> assumptions;
  std::size_t passes = 0;

  const ConstraintRecord* find(const std::string& name) const;
};

/// Integrability closure: demands dC = 0 for every active constraint C,
/// solving for the free parameter differentials and adding new constraints
/// until nothing changes.
ClosureResult consistency_closure(const HJSystem& hj, const ClosureOptions& options = {});

struct Analysis {
  HJSystem system;
  EquationsOfMotion eom;
  ClosureResult closure;
  std::map<Atom, Expr> momenta;
};

Analysis analyze(const SystemSpec& spec, const ClosureOptions& options = {});

}  // namespace hjlab::hj
