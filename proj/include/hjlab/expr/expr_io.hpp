#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hjlab/expr/expr.hpp"

namespace hjlab {

using AtomResolver = std::function<std::optional<Atom>(std::string_view display)>;

/// Resolves a display name through the global registry; fails when the name
/// is unknown or shared by atoms of different kinds.
std::optional<Atom> resolve_unique(std::string_view display);

class ExprSyntaxError : public std::runtime_error {
 public:
  ExprSyntaxError(const std::string& message, std::size_t offset);
  std::size_t offset;
};

/// Parses the text produced by Expr::str() back into an Expr.
Expr parse_expr(std::string_view text, const AtomResolver& resolve = resolve_unique);

}  // namespace hjlab
