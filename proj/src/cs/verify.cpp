#include "hjlab/cs/verify.hpp"

#include <chrono>
#include <random>

#include "hjlab/cs/fields.hpp"

namespace hjlab::cs {

bool VerifyReport::pass() const {
  for (const auto& it : items) {
    if (!it.pass) return false;
  }
  return true;
}

Census census_of(const hj::ClosureResult& closure) {
  Census c;
  for (const auto& r : closure.records) {
    (r.origin == hj::Origin::primary ? c.primary : c.secondary)++;
    switch (r.classification) {
      case hj::Classification::fixes_differential: c.fixes_differential++; break;
      case hj::Classification::generates_constraint: c.generates_constraint++; break;
      case hj::Classification::identically_zero: c.identically_zero++; break;
      case hj::Classification::pending: break;
    }
  }
  return c;
}

namespace {

// Records the first mismatch only.
struct Checker {
  VerifyItem item;

  explicit Checker(std::string name) { item.name = std::move(name); }

  bool expect(const Expr& got, const Expr& want, const std::string& label = {}) {
    if (got == want) return true;
    fail(got.str(), want.str(), label);
    return false;
  }
  void fail(const std::string& got, const std::string& want, const std::string& label = {}) {
    if (!item.pass) return;
    item.pass = false;
    item.got = label.empty() ? got : label + ": " + got;
    item.want = label.empty() ? want : label + ": " + want;
  }
};

std::string site_label(const LatticeConfig& cfg, int index) {
  return "site [" + std::to_string(index / cfg.N) + "," + std::to_string(index % cfg.N) + "]";
}

}  // namespace

VerifyReport verify_lattice(const LatticeConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  auto lattice = build_symbolic(config);
  auto analysis = hj::analyze(lattice.spec);
  VerifyReport rep{lattice, analysis, {}, census_of(analysis.closure), 0};
  auto want = expected_forms(lattice);
  const auto& hj = rep.analysis.system;
  const auto& closure = rep.analysis.closure;

  std::map<Atom, std::size_t> alpha_of;
  for (std::size_t a = 0; a < hj.parameter_count(); ++a) alpha_of[hj.hamiltonians[a].parameter] = a;
  auto record_for = [&](std::size_t alpha) -> const hj::ConstraintRecord* {
    return closure.find(hj.hamiltonians[alpha].name);
  };

  {
    Checker c("primary constraints");
    if (hj.parameter_count() != 1 + 3 * want.sites.size()) {
      c.fail(std::to_string(hj.parameter_count() - 1) + " parameters",
             std::to_string(3 * want.sites.size()) + " parameters");
    }
    for (std::size_t s = 0; s < want.sites.size(); ++s) {
      const auto& atoms = lattice.sites[s];
      for (int mu = 0; mu < 3; ++mu) {
        auto it = alpha_of.find(atoms.A[mu]);
        if (it == alpha_of.end()) {
          c.fail(atoms.A[mu].display() + " not a parameter", "H' for " + atoms.A[mu].display());
          continue;
        }
        c.expect(hj.hamiltonians[it->second].expr, want.sites[s].primaries[mu], site_label(config, s));
        const auto* rec = record_for(it->second);
        if (!rec || rec->origin != hj::Origin::primary) c.fail("no primary record", hj.hamiltonians[it->second].name);
      }
    }
    rep.items.push_back(c.item);
  }
  {
    Checker c("canonical H0");
    c.expect(hj.h0, want.h0);
    rep.items.push_back(c.item);
  }
  {
    Checker c("EOM dx0 coefficients");
    for (const auto& [var, coef] : want.eom_dx0) {
      const auto* eq = rep.analysis.eom.find(var);
      if (!eq) {
        c.fail("missing equation", "d" + var.display());
        continue;
      }
      c.expect(eq->coefficient(0), coef, "d" + var.display());
    }
    rep.items.push_back(c.item);
  }
  {
    Checker c("EOM gauge-parameter terms");
    for (const auto& eq : rep.analysis.eom.equations) {
      for (const auto& [alpha, coef] : eq.terms) {
        if (alpha == 0) continue;
        auto key = std::make_pair(eq.variable, hj.hamiltonians[alpha].parameter);
        auto it = want.eom_gauge.find(key);
        std::string label = "d" + eq.variable.display() + " along d" + key.second.display();
        c.expect(coef, it == want.eom_gauge.end() ? Expr() : it->second, label);
      }
    }
    for (const auto& [key, coef] : want.eom_gauge) {
      const auto* eq = rep.analysis.eom.find(key.first);
      auto it = alpha_of.find(key.second);
      Expr got = (eq && it != alpha_of.end()) ? eq->coefficient(it->second) : Expr();
      c.expect(got, coef, "d" + key.first.display() + " along d" + key.second.display());
    }
    rep.items.push_back(c.item);
  }
  {
    Checker c("fixed differentials");
    std::map<Atom, const hj::ConstraintRecord*> fixing;
    for (const auto& r : closure.records) {
      if (r.classification == hj::Classification::fixes_differential && r.fixed_parameter) {
        fixing[hj.hamiltonians[*r.fixed_parameter].parameter] = &r;
      }
    }
    if (fixing.size() != 2 * want.sites.size()) {
      c.fail(std::to_string(fixing.size()) + " fixed", std::to_string(2 * want.sites.size()) + " fixed");
    }
    for (std::size_t s = 0; s < want.sites.size(); ++s) {
      for (int i = 1; i <= 2; ++i) {
        Atom a = lattice.sites[s].A[i];
        const Expr& dx0 = i == 1 ? want.sites[s].fixed_dA1 : want.sites[s].fixed_dA2;
        auto it = fixing.find(a);
        if (it == fixing.end()) {
          c.fail("d" + a.display() + " free", "d" + a.display() + " = (" + dx0.str() + ") dx0");
          continue;
        }
        for (const auto& [alpha, coef] : it->second->solved) {
          c.expect(coef, alpha == 0 ? dx0 : Expr(), "d" + a.display() + " along d" + hj.hamiltonians[alpha].parameter.display());
        }
      }
    }
    rep.items.push_back(c.item);
  }

  std::vector<const hj::ConstraintRecord*> secondary_of(want.sites.size(), nullptr);
  {
    Checker c("secondary constraint");
    for (std::size_t s = 0; s < want.sites.size(); ++s) {
      const auto* parent = record_for(alpha_of.at(lattice.sites[s].A[0]));
      for (const auto& r : closure.records) {
        if (r.origin == hj::Origin::secondary && r.expr == want.sites[s].secondary) secondary_of[s] = &r;
      }
      if (!secondary_of[s]) {
        std::string got = "none";
        if (parent && !parent->generated.empty()) got = closure.find(parent->generated)->expr.str();
        c.fail(got, want.sites[s].secondary.str(), site_label(config, s));
        continue;
      }
      if (!parent || secondary_of[s]->parent != parent->name) {
        c.fail("parent " + secondary_of[s]->parent, "parent " + (parent ? parent->name : "?"), site_label(config, s));
      }
    }
    if (want.sites.size() != rep.census.secondary) {
      c.fail(std::to_string(rep.census.secondary) + " secondary", std::to_string(want.sites.size()) + " secondary");
    }
    rep.items.push_back(c.item);
  }
  {
    Checker c("identically-zero closure");
    for (std::size_t s = 0; s < want.sites.size(); ++s) {
      if (!secondary_of[s]) {
        c.fail("no secondary", "identically-zero secondary", site_label(config, s));
        continue;
      }
      if (secondary_of[s]->classification != hj::Classification::identically_zero) {
        c.fail(std::string(hj::to_string(secondary_of[s]->classification)), "identically-zero",
               secondary_of[s]->name);
      }
    }
    rep.items.push_back(c.item);
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

RhsAgreement compare_with_rhs(const VerifyReport& report, int states, std::uint64_t seed) {
  const auto& lat = report.lattice;
  const auto& cfg = lat.config;
  const auto& hj = report.analysis.system;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);

  std::map<Atom, const std::vector<std::pair<std::size_t, Expr>>*> fixed;
  for (const auto& r : report.analysis.closure.records) {
    if (r.classification == hj::Classification::fixes_differential && r.fixed_parameter) {
      fixed[hj.hamiltonians[*r.fixed_parameter].parameter] = &r.solved;
    }
  }
  auto dx0 = [&](Atom var) -> Expr {
    if (auto it = fixed.find(var); it != fixed.end()) {
      for (const auto& [alpha, coef] : *it->second) {
        if (alpha == 0) return coef;
      }
      return Expr();
    }
    return report.analysis.eom.find(var)->coefficient(0);
  };

  RhsAgreement out;
  for (int n = 0; n < states; ++n) {
    auto s = LatticeState::zeros(cfg);
    RealField a0(s.phi.size());
    Assignment values = lat.parameter_values();
    for (std::size_t k = 0; k < s.phi.size(); ++k) {
      s.phi[k] = {u(rng), u(rng)};
      s.p_phi[k] = {u(rng), u(rng)};
      s.A1[k] = u(rng);
      s.A2[k] = u(rng);
      a0[k] = u(rng);
      const auto& at = lat.sites[k];
      values[at.A[0]] = a0[k];
      values[at.A[1]] = s.A1[k];
      values[at.A[2]] = s.A2[k];
      values[at.phi] = s.phi[k];
      values[at.phic] = std::conj(s.phi[k]);
      values[at.p_phi] = s.p_phi[k];
      values[at.p_phic] = std::conj(s.p_phi[k]);
    }
    auto d = rhs(cfg, s, a0);
    auto compare = [&](Atom var, cplx numeric) {
      double diff = std::abs(evaluate(dx0(var), values) - numeric);
      if (diff >= out.max_abs_diff) {
        out.max_abs_diff = diff;
        out.worst = "d" + var.display();
      }
    };
    for (std::size_t k = 0; k < s.phi.size(); ++k) {
      const auto& at = lat.sites[k];
      compare(at.phi, d.phi[k]);
      compare(at.phic, d.phic[k]);
      compare(at.p_phi, d.p_phi[k]);
      compare(at.p_phic, d.p_phic[k]);
      compare(at.A[1], d.A1[k]);
      compare(at.A[2], d.A2[k]);
    }
    out.states++;
  }
  return out;
}

}  // namespace hjlab::cs
