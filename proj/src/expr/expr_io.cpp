#include "hjlab/expr/expr_io.hpp"

#include <cctype>

namespace hjlab {

std::optional<Atom> resolve_unique(std::string_view display) {
  auto found = Atom::lookup(display);
  if (found.size() != 1) return std::nullopt;
  return found.front();
}

ExprSyntaxError::ExprSyntaxError(const std::string& message, std::size_t off)
    : std::runtime_error(message + " at offset " + std::to_string(off)), offset(off) {}

namespace {

class DebugParser {
 public:
  DebugParser(std::string_view text, const AtomResolver& resolve) : s_(text), resolve_(resolve) {}

  Expr parse() {
    Expr e = sum();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ExprSyntaxError(msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr out;
    bool negative = accept('-');
    Expr t = product();
    out = negative ? -t : t;
    while (true) {
      if (accept('+')) {
        out += product();
      } else if (accept('-')) {
        out -= product();
      } else {
        return out;
      }
    }
  }

  Expr product() {
    Expr out = power();
    while (true) {
      if (accept('*')) {
        out *= power();
      } else if (accept('/')) {
        Expr d = power();
        if (d.is_constant() && !d.is_zero()) {
          out *= Expr(d.constant_term().inverse());
        } else if (d.is_invertible()) {
          out *= d.inverse();
        } else {
          fail("division by non-invertible expression");
        }
      } else {
        return out;
      }
    }
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    bool negative = accept('-');
    long k = integer();
    if (negative) {
      if (!base.is_invertible()) fail("negative power of non-invertible expression");
      return base.inverse().pow(static_cast<unsigned>(k));
    }
    return base.pow(static_cast<unsigned>(k));
  }

  long integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return std::stol(std::string(s_.substr(start, pos_ - start)));
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (c == '-') {
      ++pos_;
      return -power();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return Expr(ComplexRational(mpq_class(std::string(s_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return atom();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr atom() {
    std::size_t start = pos_;
    auto ident = [&] {
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '\'')) {
        ++pos_;
      }
    };
    ident();
    bool decorated = false;
    if (pos_ < s_.size() && s_[pos_] == '(') {
      int depth = 0;
      do {
        if (s_[pos_] == '(') ++depth;
        if (s_[pos_] == ')') --depth;
        ++pos_;
      } while (pos_ < s_.size() && depth > 0);
      if (depth) fail("unbalanced '(' in atom name");
      decorated = true;
    }
    if (pos_ < s_.size() && s_[pos_] == '[') {
      while (pos_ < s_.size() && s_[pos_] != ']') ++pos_;
      if (pos_ == s_.size()) fail("unterminated site index");
      ++pos_;
      decorated = true;
    }
    std::string_view name = s_.substr(start, pos_ - start);
    if (!decorated && name == "i") return Expr::i();
    auto a = resolve_(name);
    if (!a) {
      pos_ = start;
      fail("unknown or ambiguous atom '" + std::string(name) + "'");
    }
    return Expr(*a);
  }

  std::string_view s_;
  const AtomResolver& resolve_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const AtomResolver& resolve) { return DebugParser(text, resolve).parse(); }

}  // namespace hjlab
