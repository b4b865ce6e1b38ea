#pragma once

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hjlab/dsl/system_spec.hpp"

namespace hjlab::cs {

// Conventions: signature (+,-,-), eps_012 = +1, spatial components carry
// upper indices, D_i = d_i + i e A^i. Sites (x, y) on a periodic N x N grid,
// stored row-major: index = x * N + y. A^i_x lives on the link (x - e_i,
// x + e_i), so every spatial stencil is centred with stride 2h.

struct LatticeConfig {
  int N = 16;
  double h = 0.5;
  double kappa = 1.0;
  double e = 0.5;
  double m = 1.0;

  /// Throws std::invalid_argument on N < 2, h <= 0, kappa == 0 or m < 0.
  void validate() const;
  int sites() const { return N * N; }
  int index(int x, int y) const { return ((x % N + N) % N) * N + ((y % N + N) % N); }
};

class TooLargeForSymbolic : public std::invalid_argument {
 public:
  explicit TooLargeForSymbolic(int N);
};

/// The symbolic lattice model: SystemSpec plus handles to every atom.
struct SymbolicLattice {
  struct SiteAtoms {
    std::array<Atom, 3> A;       // A0, A1, A2
    std::array<Atom, 3> pi;      // their momenta
    Atom phi, phic, p_phi, p_phic;
    std::array<std::optional<Atom>, 2> U;  // link factors, absent when e = 0
  };

  LatticeConfig config;
  SystemSpec spec;
  Atom kappa, e, m, h;
  bool coupled = true;
  std::vector<SiteAtoms> sites;

  const SiteAtoms& at(int x, int y) const { return sites[config.index(x, y)]; }
  /// Numeric values of kappa, e, m, h.
  Assignment parameter_values() const;
  /// Expr for e, or 0 in the uncoupled model.
  Expr charge() const;
  /// Link factor U_{x,i} (1 when uncoupled) and its inverse.
  Expr link(int x, int y, int i) const;
  Expr link_inverse(int x, int y, int i) const;
};

/// N must be 2 or 3. Parameters kappa, e, m, h stay symbolic; e is dropped
/// (set to 0) when config.e == 0.
SymbolicLattice build_symbolic(const LatticeConfig& config);

/// Hand-written forms of the lattice constraint structure, built directly
/// from the formulas rather than through the engine.
struct ExpectedForms {
  struct Site {
    std::array<Expr, 3> primaries;  // H' for A0, A1, A2
    Expr secondary;                 // kappa*curl - j0
    Expr fixed_dA1, fixed_dA2;      // dx0 coefficients
  };
  std::vector<Site> sites;
  Expr h0;
  /// dx0 coefficient of every evolving variable (fields, momenta, pi's).
  std::map<Atom, Expr> eom_dx0;
  /// Non-time terms of the EOM: (variable, parameter atom) -> coefficient.
  std::map<std::pair<Atom, Atom>, Expr> eom_gauge;
};

ExpectedForms expected_forms(const SymbolicLattice& lattice);

}  // namespace hjlab::cs
