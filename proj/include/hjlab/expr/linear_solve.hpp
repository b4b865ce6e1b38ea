#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjlab/expr/expr.hpp"

namespace hjlab {

/// Raised when a nonzero entry that would have to serve as a pivot is neither
/// a constant nor an invertible parameter monomial.
class NonConstantPivotUndecidable : public std::runtime_error {
 public:
  explicit NonConstantPivotUndecidable(Expr pivot);
  Expr pivot;
};

using ExprMatrix = std::vector<std::vector<Expr>>;

struct LinearSolution {
  struct Pivot {
    std::size_t row;     // original row index that produced the pivot
    std::size_t column;
    Expr value;          // solution with every free column set to zero
    /// x_column = value - sum coefficient * x_free
    std::vector<std::pair<std::size_t, Expr>> free_coefficients;
  };
  struct KernelRow {
    std::size_t row;                // original row that reduced to zero
    std::vector<Expr> coefficients; // l with l^T M = 0, indexed by row
    Expr residual;                  // l . b; a new condition when nonzero
  };

  std::vector<Pivot> pivots;
  std::vector<KernelRow> kernel;
  std::vector<std::size_t> free_columns;
  /// Genericity assumptions taken at parameter pivots, e.g. "kappa != 0".
  std::vector<std::string> assumptions;

  std::size_t rank() const { return pivots.size(); }
  /// Particular solution per column (nullopt for free columns).
  std::vector<std::optional<Expr>> solution(std::size_t columns) const;
};

/// Optional reduction applied to every entry before it is zero-tested (used
/// for on-shell reduction by the constraint engine).
using Reducer = std::function<Expr(const Expr&)>;

/// Exact Gauss-Jordan elimination of M x = b, rows processed in order and
/// pivots chosen as the first invertible entry in column order. Rows that
/// reduce to zero yield left-kernel vectors together with their residual.
LinearSolution solve_linear_symbolic(const ExprMatrix& m, const std::vector<Expr>& b,
                                     const Reducer& reduce = nullptr);

}  // namespace hjlab
