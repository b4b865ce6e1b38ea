#include "hjlab/dsl/parser.hpp"

#include <cctype>
#include <memory>
#include <optional>
#include <vector>

namespace hjlab::dsl {

ParseError::ParseError(Kind k, std::string msg, int l, int c, std::string snip)
    : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
      kind(k),
      message(std::move(msg)),
      line(l),
      column(c),
      snippet(std::move(snip)) {}

std::string_view to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::syntax: return "ParseError";
    case ParseError::Kind::undeclared_atom: return "UndeclaredAtom";
    case ParseError::Kind::non_quadratic_velocity: return "NonQuadraticVelocity";
    case ParseError::Kind::duplicate_declaration: return "DuplicateDeclaration";
  }
  return "ParseError";
}

namespace {

constexpr long kMaxExponent = 64;

enum class Tok { ident, integer, punct, end };

struct Token {
  Tok type;
  std::string text;
  int line;
  int column;
};

std::string line_of(std::string_view src, int line) {
  int current = 1;
  std::size_t start = 0;
  for (std::size_t i = 0; i < src.size() && current < line; ++i) {
    if (src[i] == '\n') {
      ++current;
      start = i + 1;
    }
  }
  std::size_t end = src.find('\n', start);
  return std::string(src.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&] {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    int l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) advance();
      out.push_back({Tok::ident, std::string(src.substr(start, i - start)), l, cl});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance();
      out.push_back({Tok::integer, std::string(src.substr(start, i - start)), l, cl});
    } else if (std::string_view("+-*/^();=").find(c) != std::string_view::npos) {
      advance();
      out.push_back({Tok::punct, std::string(1, c), l, cl});
    } else {
      throw ParseError(ParseError::Kind::syntax, std::string("unexpected character '") + c + "'", l, cl,
                       line_of(src, l));
    }
  }
  out.push_back({Tok::end, "", line, col});
  return out;
}

// Expression tree kept until the whole file is read so that all semantic
// checks can run in a fixed order.
struct Node {
  enum class Kind { number, imaginary, name, dot, conj, dot_conj, add, sub, mul, div, pow, neg } kind;
  std::string text;
  int line = 0, column = 0;
  std::vector<std::unique_ptr<Node>> kids;
};

using NodePtr = std::unique_ptr<Node>;

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src), toks_(tokenize(src)) {}

  [[noreturn]] void fail(ParseError::Kind kind, const std::string& msg, const Token& at) const {
    throw ParseError(kind, msg, at.line, at.column, line_of(src_, at.line));
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(ParseError::Kind::syntax, msg, peek()); }

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
  bool is_punct(const char* p) const { return peek().type == Tok::punct && peek().text == p; }
  bool is_ident(const char* w) const { return peek().type == Tok::ident && peek().text == w; }
  void expect(const char* p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "'");
    next();
  }
  Token expect_ident() {
    if (peek().type != Tok::ident) fail("expected identifier");
    return next();
  }

  NodePtr make(Node::Kind kind, const Token& at, std::string text = {}) {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->text = std::move(text);
    n->line = at.line;
    n->column = at.column;
    return n;
  }

  NodePtr binary(Node::Kind kind, const Token& at, NodePtr a, NodePtr b) {
    auto n = make(kind, at);
    n->kids.push_back(std::move(a));
    n->kids.push_back(std::move(b));
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (is_punct("+") || is_punct("-")) {
      Token op = next();
      lhs = binary(op.text == "+" ? Node::Kind::add : Node::Kind::sub, op, std::move(lhs), term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (is_punct("*") || is_punct("/")) {
      Token op = next();
      lhs = binary(op.text == "*" ? Node::Kind::mul : Node::Kind::div, op, std::move(lhs), unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (is_punct("-") || is_punct("+")) {
      Token op = next();
      NodePtr operand = unary();
      if (op.text == "+") return operand;
      auto n = make(Node::Kind::neg, op);
      n->kids.push_back(std::move(operand));
      return n;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (is_punct("^")) {
      Token op = next();
      if (peek().type != Tok::integer) fail("expected positive integer exponent");
      Token k = next();
      if (k.text.size() > 3 || std::stol(k.text) < 1 || std::stol(k.text) > kMaxExponent) {
        fail(ParseError::Kind::syntax, "exponent must be an integer in 1.." + std::to_string(kMaxExponent), k);
      }
      base = binary(Node::Kind::pow, op, std::move(base), make(Node::Kind::number, k, k.text));
    }
    return base;
  }

  NodePtr primary() {
    const Token& t = peek();
    if (t.type == Tok::integer) return make(Node::Kind::number, next(), t.text);
    if (is_punct("(")) {
      next();
      NodePtr inner = expr();
      expect(")");
      return inner;
    }
    if (t.type == Tok::ident) {
      Token id = next();
      if (id.text == "dot" || id.text == "conj") {
        expect("(");
        if (id.text == "dot" && is_ident("conj")) {
          next();
          expect("(");
          Token inner = expect_ident();
          expect(")");
          expect(")");
          return make(Node::Kind::dot_conj, inner, inner.text);
        }
        Token inner = expect_ident();
        expect(")");
        return make(id.text == "dot" ? Node::Kind::dot : Node::Kind::conj, inner, inner.text);
      }
      if (id.text == "i") return make(Node::Kind::imaginary, id);
      return make(Node::Kind::name, id, id.text);
    }
    fail(t.type == Tok::end ? "unexpected end of input" : "unexpected token '" + t.text + "'");
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool reserved(const std::string& w) {
  return w == "i" || w == "dot" || w == "conj" || w == "param" || w == "coord" || w == "lagrangian" ||
         w == "complex";
}

struct Declared {
  SystemSpec spec;
  std::map<std::string, bool> complex_coord;  // coordinate name -> complex flag
};

// Identifiers that were never declared become placeholder atoms so that the
// velocity-degree check can run before the undeclared-name check.
struct Builder {
  const Declared& decl;
  const std::map<std::string, Atom>* names = nullptr;
  std::optional<std::pair<int, int>> first_undeclared;
  std::string undeclared_name;
  const Parser& parser;

  void note_undeclared(const Node& n, const std::string& what) {
    if (!first_undeclared) {
      first_undeclared = {n.line, n.column};
      undeclared_name = what;
    }
  }

  Atom coordinate(const Node& n, const std::string& name) {
    for (const auto& c : decl.spec.coordinates) {
      if (c.coordinate.name() == name) return c.coordinate;
    }
    note_undeclared(n, name);
    return Atom::intern("undeclared:" + name, AtomKind::coordinate);
  }

  Atom velocity_of(const Node& n, const std::string& name) {
    for (const auto& c : decl.spec.coordinates) {
      if (c.coordinate.name() == name) return c.velocity;
    }
    note_undeclared(n, name);
    return Atom::intern("undeclared:dot(" + name + ")", AtomKind::velocity);
  }

  Expr build(const Node& n) {
    switch (n.kind) {
      case Node::Kind::number: return Expr(ComplexRational(mpq_class(n.text)));
      case Node::Kind::imaginary: return Expr::i();
      case Node::Kind::name: {
        if (names) {
          auto it = names->find(n.text);
          if (it != names->end()) return Expr(it->second);
          note_undeclared(n, n.text);
          return Expr(Atom::intern("undeclared:" + n.text, AtomKind::coordinate));
        }
        for (const auto& p : decl.spec.parameters) {
          if (p.name() == n.text) return Expr(p);
        }
        return Expr(coordinate(n, n.text));
      }
      case Node::Kind::dot: return Expr(velocity_of(n, n.text));
      case Node::Kind::conj:
      case Node::Kind::dot_conj: {
        auto it = decl.complex_coord.find(n.text);
        if (it == decl.complex_coord.end() || !it->second) {
          if (it == decl.complex_coord.end()) {
            note_undeclared(n, n.text);
          } else {
            parser.fail(ParseError::Kind::syntax, "conj() requires a complex coordinate: " + n.text,
                        Token{Tok::ident, n.text, n.line, n.column});
          }
        }
        std::string conj_name = "conj(" + n.text + ")";
        return Expr(n.kind == Node::Kind::conj ? coordinate(n, conj_name) : velocity_of(n, conj_name));
      }
      case Node::Kind::neg: return -build(*n.kids[0]);
      case Node::Kind::add: return build(*n.kids[0]) + build(*n.kids[1]);
      case Node::Kind::sub: return build(*n.kids[0]) - build(*n.kids[1]);
      case Node::Kind::mul: return build(*n.kids[0]) * build(*n.kids[1]);
      case Node::Kind::div: {
        Expr num = build(*n.kids[0]);
        Expr den = build(*n.kids[1]);
        if (den.is_constant() && !den.is_zero()) return num * Expr(den.constant_term().inverse());
        if (den.is_invertible()) return num * den.inverse();
        parser.fail(ParseError::Kind::syntax, "divisor must be a nonzero constant or a product of parameters",
                    Token{Tok::punct, "/", n.line, n.column});
      }
      case Node::Kind::pow: {
        Expr base = build(*n.kids[0]);
        return base.pow(static_cast<unsigned>(std::stol(n.kids[1]->text)));
      }
    }
    return {};
  }
};

}  // namespace

SystemSpec parse(std::string_view source) {
  Parser p(source);
  Declared decl;
  NodePtr lagrangian;
  Token lagrangian_at{};
  std::map<std::string, Token> seen;

  auto declare_name = [&](const Token& id) {
    if (reserved(id.text)) p.fail(ParseError::Kind::syntax, "reserved word '" + id.text + "'", id);
    if (seen.contains(id.text)) {
      p.fail(ParseError::Kind::duplicate_declaration,
             "duplicate declaration of '" + id.text + "' (first at line " + std::to_string(seen[id.text].line) + ")",
             id);
    }
    seen.emplace(id.text, id);
    decl.spec.source_spans[id.text] = {id.line, id.column};
  };

  while (p.peek().type != Tok::end) {
    Token kw = p.peek();
    if (p.is_ident("param")) {
      p.next();
      Token id = p.expect_ident();
      declare_name(id);
      p.expect(";");
      decl.spec.add_parameter(id.text);
    } else if (p.is_ident("coord")) {
      p.next();
      Token id = p.expect_ident();
      declare_name(id);
      bool is_complex = false;
      if (p.is_ident("complex")) {
        p.next();
        is_complex = true;
      }
      p.expect(";");
      decl.complex_coord[id.text] = is_complex;
      if (is_complex) {
        decl.spec.add_complex_coordinate(id.text);
      } else {
        decl.spec.add_coordinate(id.text);
      }
    } else if (p.is_ident("lagrangian")) {
      p.next();
      if (lagrangian) p.fail(ParseError::Kind::duplicate_declaration, "second lagrangian declaration", kw);
      p.expect("=");
      lagrangian_at = kw;
      lagrangian = p.expr();
      p.expect(";");
      decl.spec.source_spans["lagrangian"] = {kw.line, kw.column};
    } else {
      p.fail("expected 'param', 'coord' or 'lagrangian'");
    }
  }
  if (!lagrangian) p.fail(ParseError::Kind::syntax, "missing lagrangian declaration", p.peek());

  Builder b{decl, nullptr, std::nullopt, {}, p};
  Expr lag = b.build(*lagrangian);
  if (velocity_degree(lag) > 2) {
    p.fail(ParseError::Kind::non_quadratic_velocity,
           "Lagrangian has degree " + std::to_string(velocity_degree(lag)) + " in velocities (at most 2)",
           lagrangian_at);
  }
  if (b.first_undeclared) {
    p.fail(ParseError::Kind::undeclared_atom, "undeclared name '" + b.undeclared_name + "'",
           Token{Tok::ident, b.undeclared_name, b.first_undeclared->first, b.first_undeclared->second});
  }
  decl.spec.lagrangian = std::move(lag);
  decl.spec.validate();
  return std::move(decl.spec);
}

Expr parse_expression(std::string_view source, const std::map<std::string, Atom>& names) {
  Parser p(source);
  NodePtr root = p.expr();
  if (p.peek().type != Tok::end) p.fail("trailing input");
  Declared empty;
  Builder b{empty, &names, std::nullopt, {}, p};
  Expr e = b.build(*root);
  if (b.first_undeclared) {
    p.fail(ParseError::Kind::undeclared_atom, "unknown name '" + b.undeclared_name + "'",
           Token{Tok::ident, b.undeclared_name, b.first_undeclared->first, b.first_undeclared->second});
  }
  return e;
}

}  // namespace hjlab::dsl
