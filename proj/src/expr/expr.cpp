#include "hjlab/expr/expr.hpp"

#include <algorithm>
#include <cmath>

namespace hjlab {

int total_degree(const Monomial& m) {
  int d = 0;
  for (const auto& [id, k] : m) d += k;
  return d;
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
  int da = total_degree(a), db = total_degree(b);
  if (da != db) return da > db;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      // atom present in a only: exponent a vs 0
      return a[i].second > 0;
    }
    if (i == a.size() || b[j].first < a[i].first) return b[j].second < 0;
    if (a[i].second != b[j].second) return a[i].second > b[j].second;
    ++i;
    ++j;
  }
  return false;
}

RecursiveBinding::RecursiveBinding(const Atom& atom)
    : std::invalid_argument("recursive binding: target of " + atom.display() + " contains " + atom.display()) {}

UnboundAtom::UnboundAtom(const Atom& a) : std::invalid_argument("unbound atom: " + a.display()), atom(a) {}

namespace {

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      int k = a[i].second + b[j].second;
      if (k != 0) out.emplace_back(a[i].first, k);
      ++i;
      ++j;
    }
  }
  return out;
}

void check_exponent(Atom::Id id, int k) {
  if (k < 0 && !Atom::from_id(id).invertible()) {
    throw std::domain_error("negative power of non-invertible atom " + Atom::from_id(id).display());
  }
}

}  // namespace

Expr::Expr(ComplexRational constant) {
  if (!constant.is_zero()) terms_.emplace(Monomial{}, std::move(constant));
}

Expr::Expr(Atom atom) { terms_.emplace(Monomial{{atom.id(), 1}}, ComplexRational(1)); }

Expr Expr::from_terms(const std::vector<std::pair<ComplexRational, std::vector<std::pair<Atom, int>>>>& terms) {
  Expr out;
  for (const auto& [c, factors] : terms) {
    Expr t(c);
    for (const auto& [a, k] : factors) {
      Monomial m{{a.id(), k}};
      check_exponent(a.id(), k);
      if (k == 0) continue;
      t = t * Expr::term(1, m);
    }
    out += t;
  }
  return out;
}

Expr Expr::term(ComplexRational coefficient, Monomial monomial) {
  std::sort(monomial.begin(), monomial.end());
  Monomial merged;
  for (const auto& [id, k] : monomial) {
    if (!merged.empty() && merged.back().first == id) {
      merged.back().second += k;
    } else {
      merged.emplace_back(id, k);
    }
  }
  std::erase_if(merged, [](const auto& f) { return f.second == 0; });
  for (const auto& [id, k] : merged) check_exponent(id, k);
  Expr out;
  out.add_term(merged, coefficient);
  return out;
}

void Expr::add_term(const Monomial& m, const ComplexRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

bool Expr::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

ComplexRational Expr::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? ComplexRational(0) : it->second;
}

bool Expr::is_invertible() const {
  if (terms_.size() != 1) return false;
  for (const auto& [id, k] : terms_.begin()->first) {
    if (!Atom::from_id(id).invertible()) return false;
  }
  return true;
}

Expr Expr::inverse() const {
  if (!is_invertible()) throw std::domain_error("expression is not an invertible monomial: " + str());
  const auto& [m, c] = *terms_.begin();
  Monomial inv = m;
  for (auto& f : inv) f.second = -f.second;
  Expr out;
  out.add_term(inv, c.inverse());
  return out;
}

std::set<Atom> Expr::atoms() const {
  std::set<Atom> out;
  for (const auto& [m, c] : terms_) {
    for (const auto& [id, k] : m) out.insert(Atom::from_id(id));
  }
  return out;
}

bool Expr::depends_on(Atom a) const {
  for (Atom b : atoms()) {
    if (b == a) return true;
    if (const Expr* arg = b.exponent_argument(); arg && arg->depends_on(a)) return true;
  }
  return false;
}

int Expr::degree_in(Atom a) const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    for (const auto& [id, k] : m) {
      if (id == a.id()) d = std::max(d, k);
    }
  }
  return d;
}

Expr Expr::operator-() const {
  Expr out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Expr& Expr::operator+=(const Expr& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Expr& Expr::operator-=(const Expr& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Expr operator*(const Expr& a, const Expr& b) {
  Expr out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(multiply(ma, mb), ca * cb);
  }
  return out;
}

Expr& Expr::operator*=(const Expr& o) { return *this = *this * o; }

Expr Expr::pow(unsigned exponent) const {
  Expr result(1);
  Expr base = *this;
  while (exponent) {
    if (exponent & 1u) result *= base;
    exponent >>= 1u;
    if (exponent) base *= base;
  }
  return result;
}

std::string Expr::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    ComplexRational coef = c;
    bool negative = false;
    // Pull a leading minus out of purely real or purely imaginary coefficients.
    if ((c.is_real() && sgn(c.re()) < 0) || (sgn(c.re()) == 0 && sgn(c.im()) < 0)) {
      negative = true;
      coef = -c;
    }
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string factors;
    for (const auto& [id, k] : m) {
      if (!factors.empty()) factors += "*";
      factors += Atom::from_id(id).display();
      if (k != 1) factors += "^" + std::to_string(k);
    }
    if (factors.empty()) {
      out += coef.str();
    } else if (coef.is_one()) {
      out += factors;
    } else {
      out += coef.str() + "*" + factors;
    }
  }
  return out;
}

Expr differentiate(const Expr& e, Atom a) {
  Expr out;
  for (const auto& [m, c] : e.terms()) {
    for (std::size_t idx = 0; idx < m.size(); ++idx) {
      const auto [id, k] = m[idx];
      Atom b = Atom::from_id(id);
      if (b == a) {
        Monomial reduced = m;
        if (k == 1) {
          reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(idx));
        } else {
          reduced[idx].second = k - 1;
        }
        out += Expr::term(c * ComplexRational(k), reduced);
      } else if (const Expr* arg = b.exponent_argument(); arg && arg->depends_on(a)) {
        // d/da exp(arg)^k = k * (d arg/da) * exp(arg)^k
        out += Expr::term(c * ComplexRational(k), m) * differentiate(*arg, a);
      }
    }
  }
  return out;
}

Expr substitute(const Expr& e, const std::map<Atom, Expr>& bindings) {
  for (const auto& [atom, target] : bindings) {
    if (target.depends_on(atom)) throw RecursiveBinding(atom);
  }
  for (Atom b : e.atoms()) {
    const Expr* arg = b.exponent_argument();
    if (!arg) continue;
    for (const auto& [atom, target] : bindings) {
      if (arg->depends_on(atom)) {
        throw std::invalid_argument("cannot substitute " + atom.display() + " inside exponential atom " +
                                    b.display());
      }
    }
  }
  std::map<std::pair<Atom::Id, int>, Expr> power_cache;
  auto power = [&](Atom::Id id, int k, const Expr& target) -> const Expr& {
    auto key = std::make_pair(id, k);
    auto it = power_cache.find(key);
    if (it != power_cache.end()) return it->second;
    if (k < 0 && !target.is_invertible()) {
      throw std::invalid_argument("cannot substitute non-invertible " + target.str() + " for " +
                                  Atom::from_id(id).display() + " under a negative power");
    }
    Expr value = k >= 0 ? target.pow(static_cast<unsigned>(k)) : target.inverse().pow(static_cast<unsigned>(-k));
    return power_cache.emplace(key, std::move(value)).first->second;
  };
  Expr out;
  for (const auto& [m, c] : e.terms()) {
    Monomial kept;
    Expr factor(c);
    for (const auto& [id, k] : m) {
      auto it = bindings.find(Atom::from_id(id));
      if (it == bindings.end()) {
        kept.emplace_back(id, k);
      } else {
        factor *= power(id, k, it->second);
      }
    }
    out += factor * Expr::term(1, kept);
  }
  return out;
}

std::complex<double> evaluate(const Expr& e, const Assignment& values) {
  std::map<Atom::Id, std::complex<double>> cache;
  auto value_of = [&](Atom::Id id) -> std::complex<double> {
    if (auto it = cache.find(id); it != cache.end()) return it->second;
    Atom a = Atom::from_id(id);
    std::complex<double> v;
    if (auto it = values.find(a); it != values.end()) {
      v = it->second;
    } else if (const Expr* arg = a.exponent_argument()) {
      v = std::exp(evaluate(*arg, values));
    } else {
      throw UnboundAtom(a);
    }
    cache.emplace(id, v);
    return v;
  };
  std::complex<double> sum = 0;
  for (const auto& [m, c] : e.terms()) {
    std::complex<double> t = c.to_complex();
    for (const auto& [id, k] : m) {
      std::complex<double> v = value_of(id);
      if (k >= 0) {
        for (int j = 0; j < k; ++j) t *= v;
      } else {
        for (int j = 0; j < -k; ++j) t /= v;
      }
    }
    sum += t;
  }
  return sum;
}

}  // namespace hjlab
