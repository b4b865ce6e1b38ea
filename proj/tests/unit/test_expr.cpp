#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "hjlab/expr/expr_io.hpp"
#include "hjlab/expr/linear_solve.hpp"
#include "hjlab/expr/poisson.hpp"

using namespace hjlab;

namespace {

struct Fixture {
  Atom q1 = Atom::intern("tq1", AtomKind::coordinate);
  Atom q2 = Atom::intern("tq2", AtomKind::coordinate);
  Atom p1 = Atom::intern("tp1", AtomKind::momentum);
  Atom p2 = Atom::intern("tp2", AtomKind::momentum);
  Atom k = Atom::intern("tk", AtomKind::parameter);
  CanonicalPairing pairing;

  Fixture() {
    pairing.add(q1, p1);
    pairing.add(q2, p2, ComplexRational::fraction(1, 4));
  }

  std::vector<Atom> atoms() const { return {q1, q2, p1, p2, k}; }

  Expr random(std::mt19937_64& rng, int terms = 4, int max_exp = 2) const {
    std::uniform_int_distribution<int> coef(-5, 5), den(1, 3), ex(0, max_exp), pick(0, 1);
    std::vector<std::pair<ComplexRational, std::vector<std::pair<Atom, int>>>> data;
    for (int t = 0; t < terms; ++t) {
      ComplexRational c(mpq_class(coef(rng), den(rng)), pick(rng) ? mpq_class(coef(rng)) : mpq_class(0));
      std::vector<std::pair<Atom, int>> mono;
      for (Atom a : atoms()) {
        int e = ex(rng);
        if (a == k && pick(rng)) e = -e;
        if (e) mono.push_back({a, e});
      }
      data.push_back({c, mono});
    }
    return Expr::from_terms(data);
  }

  Assignment random_point(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.5, 1.5);
    Assignment v;
    for (Atom a : atoms()) v[a] = {u(rng), u(rng) - 1};
    return v;
  }
};

bool close(std::complex<double> a, std::complex<double> b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("canonical form") {
  Fixture f;
  CHECK(Expr::from_terms({{2, {{f.q1, 1}}}, {-2, {{f.q1, 1}}}}).is_zero());
  CHECK(Expr::from_terms({{1, {{f.q1, 1}, {f.p1, 1}}}}) == Expr::from_terms({{1, {{f.p1, 1}, {f.q1, 1}}}}));
  CHECK(Expr::from_terms({{3, {{f.k, 2}, {f.k, -1}}}}) == Expr(3) * f.k);
  CHECK_THROWS(Expr::from_terms({{1, {{f.q1, -1}}}}));
  CHECK((Expr(f.k) * Expr(f.k).inverse()) == Expr(1));
  CHECK_THROWS_AS(Expr(f.q1).inverse(), std::domain_error);
  CHECK((Expr(f.q1) + f.p2).str() == (Expr(f.p2) + f.q1).str());

  std::mt19937_64 rng(1);
  for (int n = 0; n < 100; ++n) {
    Expr e = f.random(rng);
    CHECK(normalize(normalize(e)) == normalize(e));
    // rebuilding from the stored terms in reverse order changes nothing
    std::vector<std::pair<ComplexRational, std::vector<std::pair<Atom, int>>>> data;
    for (const auto& [m, c] : e.terms()) {
      std::vector<std::pair<Atom, int>> mono;
      for (auto [id, p] : m) mono.push_back({Atom::from_id(id), p});
      std::reverse(mono.begin(), mono.end());
      data.insert(data.begin(), {c, mono});
    }
    CHECK(Expr::from_terms(data) == e);
    CHECK((e - e).is_zero());
  }
}

TEST_CASE("complex rationals") {
  CHECK(ComplexRational::from_double(0.5) == ComplexRational::fraction(1, 2));
  CHECK(ComplexRational::from_double(-0.375) == ComplexRational::fraction(-3, 8));
  CHECK_THROWS_AS(ComplexRational(0).inverse(), std::domain_error);
  ComplexRational z(mpq_class(1, 2), -3);
  CHECK(z * z.inverse() == ComplexRational(1));
  CHECK(z.str() == "(1/2-3*i)");
  CHECK(ComplexRational::imaginary_unit().str() == "i");
  CHECK((-ComplexRational::imaginary_unit()).str() == "-i");
  CHECK(ComplexRational(mpq_class(3, 2)).str() == "3/2");
}

TEST_CASE("evaluation is a ring homomorphism") {
  Fixture f;
  std::mt19937_64 rng(2);
  for (int n = 0; n < 100; ++n) {
    Expr a = f.random(rng), b = f.random(rng);
    auto v = f.random_point(rng);
    CHECK(close(evaluate(a * b, v), evaluate(a, v) * evaluate(b, v), 1e-12));
    CHECK(close(evaluate(a + b, v), evaluate(a, v) + evaluate(b, v), 1e-12));
    CHECK(close(evaluate(a.pow(3), v), std::pow(evaluate(a, v), 3), 1e-10));
  }
  CHECK_THROWS_AS(evaluate(Expr(f.q1), {}), UnboundAtom);
}

TEST_CASE("derivatives agree with central differences") {
  Fixture f;
  std::mt19937_64 rng(3);
  const double step = 1e-5;
  for (int n = 0; n < 100; ++n) {
    Expr e = f.random(rng, 3, 3);
    auto v = f.random_point(rng);
    for (Atom a : f.atoms()) {
      auto up = v, down = v;
      up[a] += step;
      down[a] -= step;
      auto fd = (evaluate(e, up) - evaluate(e, down)) / (2 * step);
      CHECK(close(evaluate(differentiate(e, a), v), fd, 1e-6));
    }
  }
}

TEST_CASE("exponential atoms") {
  Fixture f;
  Expr arg = Expr(ComplexRational(0, -2)) * f.k * f.q1;
  Atom U = Atom::exponential("tU", {0, 1}, arg);
  CHECK(U.invertible());
  CHECK(Expr(U) * Expr(U).inverse() == Expr(1));
  CHECK(differentiate(Expr(U), f.q1) == Expr(ComplexRational(0, -2)) * f.k * U);
  CHECK(Expr(U).depends_on(f.q1));
  CHECK_FALSE(Expr(U).atoms().count(f.q1));
  Assignment v{{f.k, 0.7}, {f.q1, 0.3}};
  CHECK(close(evaluate(Expr(U), v), std::exp(std::complex<double>(0, -2 * 0.7 * 0.3)), 1e-14));
  CHECK_THROWS(Atom::exponential("tU", {0, 1}, Expr(f.q1)));
  CHECK_THROWS_AS(substitute(Expr(U), {{f.q1, Expr(f.q2)}}), std::invalid_argument);
}

TEST_CASE("substitution") {
  Fixture f;
  std::mt19937_64 rng(4);
  for (int n = 0; n < 50; ++n) {
    Expr e = f.random(rng), g = substitute(f.random(rng, 2, 1), {{f.q1, Expr(0)}});
    auto v = f.random_point(rng);
    auto w = v;
    w[f.q1] = evaluate(g, v);
    CHECK(close(evaluate(substitute(e, {{f.q1, g}}), v), evaluate(e, w), 1e-10));
  }
  // simultaneous, not sequential
  CHECK(substitute(Expr(f.q1) + Expr(2) * f.q2, {{f.q1, Expr(f.q2)}, {f.q2, Expr(f.q1)}}) ==
        Expr(f.q2) + Expr(2) * f.q1);
  CHECK_THROWS_AS(substitute(Expr(f.q1), {{f.q1, Expr(f.q1) + 1}}), RecursiveBinding);
  CHECK_THROWS_AS(substitute(Expr(f.k).inverse(), {{f.k, Expr(f.q1)}}), std::invalid_argument);
}

TEST_CASE("Poisson bracket: canonical pairs and weights") {
  Fixture f;
  CHECK(poisson_bracket(f.q1, f.p1, f.pairing) == Expr(1));
  CHECK(poisson_bracket(f.p1, f.q1, f.pairing) == Expr(-1));
  CHECK(poisson_bracket(f.q2, f.p2, f.pairing) == Expr(ComplexRational::fraction(1, 4)));
  CHECK(poisson_bracket(f.q1, f.p2, f.pairing).is_zero());
  CHECK(poisson_bracket(f.k, f.p1, f.pairing).is_zero());
  CHECK_THROWS_AS(f.pairing.add(f.q1, f.p2), std::invalid_argument);
  CanonicalPairing bad;
  CHECK_THROWS_AS(bad.add(f.q1, f.p1, -1), std::invalid_argument);
}

TEST_CASE("Poisson bracket identities hold exactly on random polynomials") {
  Fixture f;
  std::mt19937_64 rng(5);
  for (int n = 0; n < 100; ++n) {
    Expr a = f.random(rng, 3), b = f.random(rng, 3), c = f.random(rng, 3);
    auto br = [&](const Expr& x, const Expr& y) { return poisson_bracket(x, y, f.pairing); };
    CHECK((br(a, b) + br(b, a)).is_zero());
    CHECK(br(a * b, c) == a * br(b, c) + br(a, c) * b);
    CHECK((br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b))).is_zero());
    CHECK(br(a, Expr(ComplexRational::fraction(7, 3))).is_zero());
  }
}

TEST_CASE("expression text round trip") {
  Fixture f;
  std::mt19937_64 rng(6);
  for (int n = 0; n < 100; ++n) {
    Expr e = f.random(rng);
    CHECK(parse_expr(e.str()) == e);
  }
  CHECK(parse_expr("0").is_zero());
  CHECK_THROWS_AS(parse_expr("tq1 +"), ExprSyntaxError);
  CHECK_THROWS_AS(parse_expr("no_such_atom_anywhere"), ExprSyntaxError);
}

namespace {

// Cramer's rule over exact rationals.
mpq_class det3(const mpq_class m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

TEST_CASE("linear solve matches Cramer's rule on random rational systems") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
  int solved = 0;
  for (int n = 0; n < 100; ++n) {
    mpq_class m[3][3], b[3];
    for (auto& row : m) {
      for (auto& v : row) v = mpq_class(num(rng), den(rng));
    }
    for (auto& v : b) v = mpq_class(num(rng), den(rng));
    for (auto& row : m) {
      for (auto& v : row) v.canonicalize();
    }
    for (auto& v : b) v.canonicalize();
    mpq_class d = det3(m);
    ExprMatrix M(3, std::vector<Expr>(3));
    std::vector<Expr> B(3);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) M[r][c] = Expr(ComplexRational(m[r][c]));
      B[r] = Expr(ComplexRational(b[r]));
    }
    auto sol = solve_linear_symbolic(M, B);
    if (d == 0) {
      CHECK(sol.rank() < 3);
      continue;
    }
    ++solved;
    REQUIRE(sol.rank() == 3);
    auto x = sol.solution(3);
    for (int c = 0; c < 3; ++c) {
      mpq_class mc[3][3];
      for (int r = 0; r < 3; ++r) {
        for (int k = 0; k < 3; ++k) mc[r][k] = k == c ? b[r] : m[r][k];
      }
      mpq_class want = det3(mc) / d;
      REQUIRE(x[c].has_value());
      CHECK(*x[c] == Expr(ComplexRational(want)));
    }
  }
  CHECK(solved > 80);
}

TEST_CASE("linear solve: kernel rows, free columns, parameter pivots") {
  Fixture f;
  // rows 0 and 2 are dependent; residual exposes the consistency condition
  ExprMatrix M{{1, 2, 0}, {0, 0, 1}, {2, 4, 0}};
  auto sol = solve_linear_symbolic(M, {Expr(f.q1), Expr(f.q2), Expr(f.p1)});
  CHECK(sol.rank() == 2);
  REQUIRE(sol.kernel.size() == 1);
  CHECK(sol.kernel[0].row == 2);
  CHECK(sol.kernel[0].residual == Expr(f.p1) - Expr(2) * f.q1);
  CHECK(sol.free_columns == std::vector<std::size_t>{1});

  auto param = solve_linear_symbolic({{Expr(f.k)}}, {Expr(f.q1)});
  CHECK(param.solution(1)[0] == Expr(f.q1) * Expr(f.k).inverse());
  CHECK(param.assumptions == std::vector<std::string>{"tk != 0"});
  CHECK_THROWS_AS(solve_linear_symbolic({{Expr(f.q1)}}, {Expr(1)}), NonConstantPivotUndecidable);
}
