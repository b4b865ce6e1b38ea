#include "hjlab/expr/linear_solve.hpp"

#include <algorithm>

namespace hjlab {

NonConstantPivotUndecidable::NonConstantPivotUndecidable(Expr p)
    : std::runtime_error("cannot decide whether pivot is nonzero: " + p.str()), pivot(std::move(p)) {}

std::vector<std::optional<Expr>> LinearSolution::solution(std::size_t columns) const {
  std::vector<std::optional<Expr>> out(columns);
  for (const auto& p : pivots) out[p.column] = p.value;
  return out;
}

namespace {

struct WorkRow {
  std::size_t origin;
  std::vector<Expr> entries;
  std::vector<Expr> combination;
  Expr rhs;
  std::size_t pivot_column = 0;
};

std::string assumption_text(const Expr& pivot) {
  std::string out;
  for (const auto& [id, k] : pivot.terms().begin()->first) {
    if (!out.empty()) out += ", ";
    out += Atom::from_id(id).display() + " != 0";
  }
  return out;
}

}  // namespace

LinearSolution solve_linear_symbolic(const ExprMatrix& m, const std::vector<Expr>& b, const Reducer& reduce) {
  if (m.size() != b.size()) throw std::invalid_argument("row count of M and b differ");
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m.front().size() : 0;
  for (const auto& r : m) {
    if (r.size() != cols) throw std::invalid_argument("ragged matrix");
  }
  auto red = [&](const Expr& e) { return reduce ? reduce(e) : e; };

  LinearSolution out;
  std::vector<WorkRow> pivot_rows;
  for (std::size_t r = 0; r < rows; ++r) {
    WorkRow row{r, {}, std::vector<Expr>(rows), b[r]};
    row.combination[r] = 1;
    row.entries.reserve(cols);
    for (const auto& e : m[r]) row.entries.push_back(red(e));
    for (const auto& p : pivot_rows) {
      const Expr factor = row.entries[p.pivot_column];
      if (factor.is_zero()) continue;
      for (std::size_t c = 0; c < cols; ++c) {
        if (!p.entries[c].is_zero()) row.entries[c] = red(row.entries[c] - factor * p.entries[c]);
      }
      for (std::size_t k = 0; k < rows; ++k) {
        if (!p.combination[k].is_zero()) row.combination[k] -= factor * p.combination[k];
      }
      row.rhs -= factor * p.rhs;
    }
    row.rhs = red(row.rhs);

    std::optional<std::size_t> pivot;
    const Expr* undecidable = nullptr;
    for (std::size_t c = 0; c < cols; ++c) {
      const Expr& e = row.entries[c];
      if (e.is_zero()) continue;
      if (e.is_invertible()) {
        pivot = c;
        break;
      }
      if (!undecidable) undecidable = &e;
    }
    if (!pivot) {
      if (undecidable) throw NonConstantPivotUndecidable(*undecidable);
      out.kernel.push_back({r, std::move(row.combination), std::move(row.rhs)});
      continue;
    }

    const Expr& pv = row.entries[*pivot];
    if (!pv.is_constant()) {
      auto text = assumption_text(pv);
      if (std::find(out.assumptions.begin(), out.assumptions.end(), text) == out.assumptions.end()) {
        out.assumptions.push_back(text);
      }
    }
    const Expr inv = pv.inverse();
    for (auto& e : row.entries) e = red(e * inv);
    for (auto& e : row.combination) e = e * inv;
    row.rhs = red(row.rhs * inv);
    row.pivot_column = *pivot;

    // Clear the new pivot column from earlier pivot rows (Gauss-Jordan).
    for (auto& p : pivot_rows) {
      const Expr factor = p.entries[*pivot];
      if (factor.is_zero()) continue;
      for (std::size_t c = 0; c < cols; ++c) {
        if (!row.entries[c].is_zero()) p.entries[c] = red(p.entries[c] - factor * row.entries[c]);
      }
      for (std::size_t k = 0; k < rows; ++k) {
        if (!row.combination[k].is_zero()) p.combination[k] -= factor * row.combination[k];
      }
      p.rhs = red(p.rhs - factor * row.rhs);
    }
    pivot_rows.push_back(std::move(row));
  }

  std::vector<bool> is_pivot(cols, false);
  for (const auto& p : pivot_rows) is_pivot[p.pivot_column] = true;
  for (std::size_t c = 0; c < cols; ++c) {
    if (!is_pivot[c]) out.free_columns.push_back(c);
  }
  for (auto& p : pivot_rows) {
    LinearSolution::Pivot piv{p.origin, p.pivot_column, p.rhs, {}};
    for (std::size_t f : out.free_columns) {
      if (!p.entries[f].is_zero()) piv.free_coefficients.emplace_back(f, p.entries[f]);
    }
    out.pivots.push_back(std::move(piv));
  }
  return out;
}

}  // namespace hjlab
