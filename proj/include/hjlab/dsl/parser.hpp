#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "hjlab/dsl/system_spec.hpp"

namespace hjlab::dsl {

/// Every failure of `parse` is reported as a ParseError with a position.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { syntax, undeclared_atom, non_quadratic_velocity, duplicate_declaration };
  ParseError(Kind kind, std::string message, int line, int column, std::string snippet);

  Kind kind;
  std::string message;
  int line;
  int column;
  std::string snippet;
};

std::string_view to_string(ParseError::Kind kind);

/// Parses a `.hjl` system description:
///
///   decl := "param" ident ";"
///         | "coord" ident ["complex"] ";"
///         | "lagrangian" "=" expr ";"
///
/// Expressions use + - * / ^, parentheses, dot(q), conj(q), dot(conj(q)),
/// integer literals and the imaginary unit `i`. `#` starts a line comment.
SystemSpec parse(std::string_view source);

/// Parses a standalone polynomial expression whose identifiers are resolved
/// against `names` (display name -> atom). Used for gauge-function inputs.
Expr parse_expression(std::string_view source, const std::map<std::string, Atom>& names);

}  // namespace hjlab::dsl
