#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hjlab/cs/lattice.hpp"
#include "hjlab/hj/engine.hpp"

namespace hjlab::cs {

struct VerifyItem {
  std::string name;
  bool pass = true;
  std::string got;   // first differing pair, empty on pass
  std::string want;
};

struct Census {
  std::size_t primary = 0;
  std::size_t secondary = 0;
  std::size_t fixes_differential = 0;
  std::size_t generates_constraint = 0;
  std::size_t identically_zero = 0;
};

struct VerifyReport {
  SymbolicLattice lattice;
  hj::Analysis analysis;
  std::vector<VerifyItem> items;
  Census census;
  double seconds = 0;

  bool pass() const;
};

Census census_of(const hj::ClosureResult& closure);

/// Builds the lattice, runs the engine without any gauge input and diffs the
/// result against expected_forms(): primaries, H0, dx0 coefficients, gauge
/// parameter terms, fixed differentials, secondary constraints, and the
/// identically-zero classification.
VerifyReport verify_lattice(const LatticeConfig& config);

struct RhsAgreement {
  double max_abs_diff = 0;
  int states = 0;
  std::string worst;  // component with the largest difference
};

/// Evaluates the engine's dx0 equations (and the fixed dA1, dA2) at random
/// reality-symmetric states with random A0 and compares them with rhs().
RhsAgreement compare_with_rhs(const VerifyReport& report, int states, std::uint64_t seed);

}  // namespace hjlab::cs
