#include "hjlab/hj/engine.hpp"

#include <algorithm>

namespace hjlab::hj {

ResidualVelocity::ResidualVelocity(const std::string& where, const Expr& e)
    : std::logic_error("velocity survived in " + where + ": " + e.str()) {}

ClosureLimitExceeded::ClosureLimitExceeded(std::size_t passes)
    : std::runtime_error("consistency closure did not terminate within " + std::to_string(passes) + " passes") {}

std::string_view to_string(Origin o) { return o == Origin::primary ? "primary" : "secondary"; }

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::pending: return "pending";
    case Classification::generates_constraint: return "generates-constraint";
    case Classification::fixes_differential: return "fixes-differential";
    case Classification::identically_zero: return "identically-zero";
  }
  return "pending";
}

namespace {

bool has_velocity(const Expr& e) {
  for (Atom a : e.atoms()) {
    if (a.kind() == AtomKind::velocity) return true;
  }
  return false;
}

void merge_assumptions(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const auto& a : from) {
    if (std::find(into.begin(), into.end(), a) == into.end()) into.push_back(a);
  }
}

Expr inverse_weight(const ComplexRational& w) { return Expr(w.inverse()); }

}  // namespace

std::map<Atom, Expr> compute_momenta(const SystemSpec& spec) {
  std::map<Atom, Expr> out;
  for (const auto& c : spec.coordinates) {
    out.emplace(c.coordinate, Expr(c.weight) * differentiate(spec.lagrangian, c.velocity));
  }
  return out;
}

HessianSplit hessian_split(const SystemSpec& spec) {
  spec.validate();
  const auto n = spec.coordinates.size();
  HessianSplit split;
  std::vector<Expr> first(n);
  for (std::size_t i = 0; i < n; ++i) first[i] = differentiate(spec.lagrangian, spec.coordinates[i].velocity);
  split.hessian.assign(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      split.hessian[i][j] = differentiate(first[i], spec.coordinates[j].velocity);
    }
  }

  auto rank_probe = solve_linear_symbolic(split.hessian, std::vector<Expr>(n));
  split.rank = rank_probe.rank();
  merge_assumptions(split.assumptions, rank_probe.assumptions);
  std::vector<bool> is_regular(n, false);
  for (const auto& p : rank_probe.pivots) is_regular[p.column] = true;
  for (std::size_t i = 0; i < n; ++i) (is_regular[i] ? split.regular : split.singular).push_back(i);

  // Solve p_a / w_a = dL/dv_a for the regular velocities. The principal block
  // on independent columns of a symmetric matrix is nonsingular.
  std::map<Atom, Expr> zero_velocity;
  for (const auto& c : spec.coordinates) zero_velocity.emplace(c.velocity, Expr());
  const auto r = split.regular.size();
  ExprMatrix block(r, std::vector<Expr>(r));
  std::vector<Expr> rhs(r);
  for (std::size_t i = 0; i < r; ++i) {
    const auto& ci = spec.coordinates[split.regular[i]];
    Expr value = Expr(ci.momentum) * inverse_weight(ci.weight) - substitute(first[split.regular[i]], zero_velocity);
    for (std::size_t j = 0; j < r; ++j) block[i][j] = split.hessian[split.regular[i]][split.regular[j]];
    for (std::size_t mu : split.singular) {
      value -= split.hessian[split.regular[i]][mu] * Expr(spec.coordinates[mu].velocity);
    }
    rhs[i] = value;
  }
  auto solved = solve_linear_symbolic(block, rhs);
  merge_assumptions(split.assumptions, solved.assumptions);
  if (solved.rank() != r) throw std::logic_error("regular Hessian block is singular");
  for (const auto& p : solved.pivots) {
    split.solved_velocities.emplace(spec.coordinates[split.regular[p.column]].velocity, p.value);
  }
  return split;
}

namespace {

// H_mu = -w_mu dL/dv_mu on the regular solution.
std::vector<Expr> singular_hamiltonians(const SystemSpec& spec, const HessianSplit& split) {
  std::vector<Expr> out;
  for (std::size_t mu : split.singular) {
    const auto& c = spec.coordinates[mu];
    Expr h = -(Expr(c.weight) * substitute(differentiate(spec.lagrangian, c.velocity), split.solved_velocities));
    if (has_velocity(h)) throw ResidualVelocity("H_" + c.coordinate.display(), h);
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace

Expr build_h0(const SystemSpec& spec, const HessianSplit& split) {
  auto h_mu = singular_hamiltonians(spec, split);
  Expr h0 = -spec.lagrangian;
  for (std::size_t a : split.regular) {
    const auto& c = spec.coordinates[a];
    h0 += Expr(c.momentum) * inverse_weight(c.weight) * Expr(c.velocity);
  }
  for (std::size_t k = 0; k < split.singular.size(); ++k) {
    const auto& c = spec.coordinates[split.singular[k]];
    h0 -= h_mu[k] * inverse_weight(c.weight) * Expr(c.velocity);
  }
  h0 = substitute(h0, split.solved_velocities);
  if (has_velocity(h0)) throw ResidualVelocity("H0", h0);
  return h0;
}

Expr HJSystem::generator(std::size_t alpha) const {
  const auto& h = hamiltonians.at(alpha);
  return h.expr * inverse_weight(h.weight);
}

Expr HJSystem::h_alpha(std::size_t alpha) const {
  const auto& h = hamiltonians.at(alpha);
  return h.expr - Expr(h.momentum);
}

std::vector<Atom> HJSystem::atoms() const {
  std::vector<Atom> out{time, time_momentum};
  for (const auto& c : spec.coordinates) {
    out.push_back(c.coordinate);
    out.push_back(c.velocity);
    out.push_back(c.momentum);
  }
  for (Atom p : spec.parameters) out.push_back(p);
  std::set<Atom> extra;
  auto collect = [&](const Expr& e) {
    for (Atom a : e.atoms()) {
      if (a.kind() == AtomKind::exponential) extra.insert(a);
    }
  };
  collect(spec.lagrangian);
  collect(h0);
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

HJSystem build_hprimes(const SystemSpec& spec, const HessianSplit& split, const Expr& h0) {
  HJSystem hj{spec, split, Atom::intern("t", AtomKind::time_parameter),
              Atom::intern("p(t)", AtomKind::momentum), h0, {}, {}, split.assumptions};
  hj.hamiltonians.push_back({"H'0", hj.time, hj.time_momentum, Expr(hj.time_momentum) + h0, 1});
  auto h_mu = singular_hamiltonians(spec, split);
  for (std::size_t k = 0; k < split.singular.size(); ++k) {
    const auto& c = spec.coordinates[split.singular[k]];
    hj.hamiltonians.push_back(
        {"H'" + std::to_string(k + 1), c.coordinate, c.momentum, Expr(c.momentum) + h_mu[k], c.weight});
  }
  for (const auto& c : spec.coordinates) hj.pairing.add(c.coordinate, c.momentum, c.weight);
  hj.pairing.add(hj.time, hj.time_momentum, 1);
  return hj;
}

HJSystem build_system(const SystemSpec& spec) {
  auto split = hessian_split(spec);
  auto h0 = build_h0(spec, split);
  return build_hprimes(spec, split, h0);
}

Expr TotalDifferential::coefficient(std::size_t alpha) const {
  for (const auto& [a, e] : terms) {
    if (a == alpha) return e;
  }
  return {};
}

const TotalDifferential* EquationsOfMotion::find(Atom variable) const {
  for (const auto& eq : equations) {
    if (eq.variable == variable) return &eq;
  }
  return nullptr;
}

EquationsOfMotion derive_eom(const HJSystem& hj) {
  EquationsOfMotion eom;
  const auto count = hj.parameter_count();
  std::vector<Expr> generators;
  for (std::size_t a = 0; a < count; ++a) generators.push_back(hj.generator(a));

  auto push = [&](Atom variable, auto&& coefficient) {
    TotalDifferential d{variable, {}};
    for (std::size_t a = 0; a < count; ++a) {
      Expr c = coefficient(a);
      if (!c.is_zero()) d.terms.emplace_back(a, std::move(c));
    }
    eom.equations.push_back(std::move(d));
  };

  for (std::size_t idx : hj.split.regular) {
    const auto& c = hj.spec.coordinates[idx];
    const Expr w(c.weight);
    push(c.coordinate, [&](std::size_t a) { return w * differentiate(generators[a], c.momentum); });
    push(c.momentum, [&](std::size_t a) { return -(w * differentiate(generators[a], c.coordinate)); });
  }
  for (std::size_t idx : hj.split.singular) {
    const auto& c = hj.spec.coordinates[idx];
    const Expr w(c.weight);
    push(c.momentum, [&](std::size_t a) { return -(w * differentiate(generators[a], c.coordinate)); });
  }

  for (std::size_t a = 0; a < count; ++a) {
    Expr dz = -(hj.h_alpha(a) * inverse_weight(hj.hamiltonians[a].weight));
    for (std::size_t idx : hj.split.regular) {
      const auto& c = hj.spec.coordinates[idx];
      dz += Expr(c.momentum) * differentiate(generators[a], c.momentum);
    }
    if (!dz.is_zero()) eom.action.emplace_back(a, std::move(dz));
  }
  return eom;
}

const ConstraintRecord* ClosureResult::find(const std::string& name) const {
  for (const auto& r : records) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

namespace {

// Substitution rules solved from active constraints, used to decide whether
// an expression vanishes on the constraint surface.
class OnShellReducer {
 public:
  explicit OnShellReducer(std::set<Atom> protected_atoms) : protected_(std::move(protected_atoms)) {}

  void add_constraint(const Expr& c) {
    Expr reduced = reduce(c);
    if (reduced.is_zero()) return;
    auto target = pick_atom(reduced);
    if (!target) return;
    Expr coefficient;
    Expr rest;
    for (const auto& [m, coef] : reduced.terms()) {
      Expr t = Expr::term(coef, m);
      if (t.depends_on(*target)) {
        coefficient += differentiate(t, *target);
      } else {
        rest += t;
      }
    }
    Expr value = -(rest * coefficient.inverse());
    std::map<Atom, Expr> single{{*target, value}};
    for (auto& [atom, existing] : rules_) existing = substitute(existing, single);
    rules_.emplace(*target, std::move(value));
  }

  Expr reduce(const Expr& e) const { return rules_.empty() ? e : substitute(e, rules_); }

 private:
  // An atom occurring in exactly one term, linearly, with an invertible
  // cofactor. Momenta are preferred, then later-declared atoms.
  std::optional<Atom> pick_atom(const Expr& e) const {
    std::vector<Atom> candidates;
    for (Atom a : e.atoms()) {
      if (protected_.contains(a) || a.invertible()) continue;
      int occurrences = 0;
      bool ok = true;
      for (const auto& [m, coef] : e.terms()) {
        for (const auto& [id, k] : m) {
          if (id != a.id()) continue;
          ++occurrences;
          if (k != 1) ok = false;
          for (const auto& [other, kk] : m) {
            if (other != id && !Atom::from_id(other).invertible()) ok = false;
          }
        }
      }
      if (ok && occurrences == 1) candidates.push_back(a);
    }
    if (candidates.empty()) return std::nullopt;
    auto momentum = std::find_if(candidates.begin(), candidates.end(),
                                 [](Atom a) { return a.kind() == AtomKind::momentum; });
    if (momentum != candidates.end()) return *momentum;
    return candidates.back();
  }

  std::set<Atom> protected_;
  std::map<Atom, Expr> rules_;
};

std::set<Atom> exponential_parents(const HJSystem& hj) {
  std::set<Atom> out;
  auto scan = [&](const Expr& e) {
    for (Atom a : e.atoms()) {
      if (const Expr* arg = a.exponent_argument()) {
        for (Atom p : arg->atoms()) out.insert(p);
      }
    }
  };
  scan(hj.spec.lagrangian);
  for (const auto& h : hj.hamiltonians) scan(h.expr);
  return out;
}

}  // namespace

ClosureResult consistency_closure(const HJSystem& hj, const ClosureOptions& options) {
  ClosureResult out;
  for (const auto& p : options.assume_nonzero) out.assumptions.push_back(p + " != 0");
  merge_assumptions(out.assumptions, hj.assumptions);

  const std::size_t count = hj.parameter_count();
  const std::size_t max_passes = options.max_passes ? options.max_passes : 10 * std::max<std::size_t>(1, hj.spec.coordinates.size());
  std::vector<Expr> generators;
  for (std::size_t a = 0; a < count; ++a) generators.push_back(hj.generator(a));

  OnShellReducer reducer(exponential_parents(hj));
  std::vector<std::size_t> pending;
  for (std::size_t a = 1; a < count; ++a) {
    out.records.push_back({hj.hamiltonians[a].name, hj.hamiltonians[a].expr, Origin::primary, {}, Classification::pending, {}, {}, {}});
    pending.push_back(out.records.size() - 1);
    reducer.add_constraint(hj.hamiltonians[a].expr);
  }
  std::size_t next_index = count;

  // fixed[alpha][beta]: dt_alpha = sum_beta fixed[alpha][beta] dt_beta
  std::map<std::size_t, std::vector<Expr>> fixed;
  auto is_free = [&](std::size_t a) { return a != 0 && !fixed.contains(a); };
  auto reduce = [&](const Expr& e) { return reducer.reduce(e); };

  while (!pending.empty()) {
    if (++out.passes > max_passes) throw ClosureLimitExceeded(max_passes);
    std::vector<std::size_t> free_params;
    for (std::size_t a = 1; a < count; ++a) {
      if (is_free(a)) free_params.push_back(a);
    }

    ExprMatrix m(pending.size(), std::vector<Expr>(free_params.size()));
    std::vector<Expr> b(pending.size());
    for (std::size_t k = 0; k < pending.size(); ++k) {
      const Expr& c = out.records[pending[k]].expr;
      std::vector<Expr> brackets(count);
      for (std::size_t a = 0; a < count; ++a) brackets[a] = poisson_bracket(c, generators[a], hj.pairing);
      std::vector<Expr> effective(count);
      for (std::size_t beta = 0; beta < count; ++beta) {
        if (beta != 0 && !is_free(beta)) continue;
        Expr e = brackets[beta];
        for (const auto& [mu, row] : fixed) {
          if (!brackets[mu].is_zero() && !row[beta].is_zero()) e += brackets[mu] * row[beta];
        }
        effective[beta] = reduce(e);
      }
      for (std::size_t f = 0; f < free_params.size(); ++f) m[k][f] = effective[free_params[f]];
      b[k] = -effective[0];
    }

    auto solution = solve_linear_symbolic(m, b, reduce);
    merge_assumptions(out.assumptions, solution.assumptions);

    for (const auto& piv : solution.pivots) {
      const std::size_t alpha = free_params[piv.column];
      std::vector<Expr> row(count);
      row[0] = piv.value;
      for (const auto& [f, coef] : piv.free_coefficients) row[free_params[f]] = -coef;
      // Earlier fixed differentials that referred to dt_alpha.
      for (auto& [mu, other] : fixed) {
        if (other[alpha].is_zero()) continue;
        Expr factor = other[alpha];
        other[alpha] = Expr();
        for (std::size_t beta = 0; beta < count; ++beta) {
          if (!row[beta].is_zero()) other[beta] = reduce(other[beta] + factor * row[beta]);
        }
      }
      fixed.emplace(alpha, std::move(row));
      auto& rec = out.records[pending[piv.row]];
      rec.classification = Classification::fixes_differential;
      rec.fixed_parameter = alpha;
    }

    std::vector<std::size_t> next_pending;
    for (const auto& ker : solution.kernel) {
      auto& rec = out.records[pending[ker.row]];
      if (ker.residual.is_zero()) {
        rec.classification = Classification::identically_zero;
        continue;
      }
      rec.classification = Classification::generates_constraint;
      ConstraintRecord child{"H'" + std::to_string(next_index++), ker.residual, Origin::secondary, rec.name,
                             Classification::pending, {}, {}, {}};
      rec.generated = child.name;
      reducer.add_constraint(child.expr);
      out.records.push_back(std::move(child));
      next_pending.push_back(out.records.size() - 1);
    }
    pending = std::move(next_pending);
  }

  for (auto& rec : out.records) {
    if (rec.classification != Classification::fixes_differential) continue;
    const auto& row = fixed.at(*rec.fixed_parameter);
    rec.solved.clear();
    for (std::size_t beta = 0; beta < count; ++beta) {
      if (!row[beta].is_zero() || beta == 0) rec.solved.emplace_back(beta, row[beta]);
    }
  }
  return out;
}

Analysis analyze(const SystemSpec& spec, const ClosureOptions& options) {
  Analysis a{build_system(spec), {}, {}, compute_momenta(spec)};
  a.eom = derive_eom(a.system);
  a.closure = consistency_closure(a.system, options);
  return a;
}

}  // namespace hjlab::hj
