#include "hjlab/hj/report.hpp"

#include <json.hpp>
#include <sstream>

namespace hjlab::hj {

using nlohmann::json;

namespace {

std::string parameter_name(const Analysis& a, std::size_t alpha) {
  return a.system.hamiltonians[alpha].parameter.display();
}

std::string differential_text(const Analysis& a, const std::vector<std::pair<std::size_t, Expr>>& terms) {
  if (terms.empty()) return "0";
  std::string out;
  for (const auto& [alpha, c] : terms) {
    if (!out.empty()) out += " + ";
    out += "(" + c.str() + ") d" + parameter_name(a, alpha);
  }
  return out;
}

Origin origin_from(const std::string& s) {
  if (s == to_string(Origin::primary)) return Origin::primary;
  if (s == to_string(Origin::secondary)) return Origin::secondary;
  throw std::invalid_argument("unknown constraint origin '" + s + "'");
}

Classification classification_from(const std::string& s) {
  for (auto c : {Classification::pending, Classification::generates_constraint, Classification::fixes_differential,
                 Classification::identically_zero}) {
    if (s == to_string(c)) return c;
  }
  throw std::invalid_argument("unknown classification '" + s + "'");
}

}  // namespace

std::string render_text(const Analysis& a) {
  const auto& spec = a.system.spec;
  std::ostringstream out;
  out << "system: " << (spec.name.empty() ? "(unnamed)" : spec.name) << "\n";
  out << "coordinates:";
  for (const auto& c : spec.coordinates) out << " " << c.coordinate.display();
  out << "\nparameters:";
  for (Atom p : spec.parameters) out << " " << p.display();
  out << "\n\nmomenta:\n";
  for (const auto& c : spec.coordinates) out << "  " << c.momentum.display() << " = " << a.momenta.at(c.coordinate).str() << "\n";
  out << "hessian rank: " << a.system.split.rank << " of " << spec.coordinates.size() << "\n\n";

  out << "hamiltonians:\n";
  for (const auto& h : a.system.hamiltonians) out << "  " << h.name << " [" << h.parameter.display() << "] = " << h.expr.str() << "\n";

  out << "\nequations of motion:\n";
  for (const auto& eq : a.eom.equations) out << "  d" << eq.variable.display() << " = " << differential_text(a, eq.terms) << "\n";
  out << "  dz = " << differential_text(a, a.eom.action) << "\n";

  out << "\nconstraints: " << a.closure.records.size() << "\n";
  for (const auto& r : a.closure.records) {
    out << "  " << r.name << " " << to_string(r.origin);
    if (!r.parent.empty()) out << " (from " << r.parent << ")";
    out << " " << to_string(r.classification) << ": " << r.expr.str() << "\n";
    if (r.fixed_parameter) {
      out << "    d" << parameter_name(a, *r.fixed_parameter) << " = " << differential_text(a, r.solved) << "\n";
    }
  }
  out << "\nassumptions:";
  if (a.closure.assumptions.empty()) out << " none";
  for (const auto& s : a.closure.assumptions) out << "\n  " << s;
  out << "\n";
  return out.str();
}

std::string render_json(const Analysis& a, int indent) {
  const auto& spec = a.system.spec;
  json coords = json::array(), params = json::array(), momenta = json::array();
  for (const auto& c : spec.coordinates) {
    coords.push_back(c.coordinate.display());
    momenta.push_back({{"coord", c.coordinate.display()}, {"expr", a.momenta.at(c.coordinate).str()}});
  }
  for (Atom p : spec.parameters) params.push_back(p.display());

  auto terms_json = [&](const std::vector<std::pair<std::size_t, Expr>>& terms) {
    json t = json::array();
    for (const auto& [alpha, c] : terms) t.push_back({{"wrt", parameter_name(a, alpha)}, {"expr", c.str()}});
    return t;
  };

  json constraints = json::array();
  for (const auto& r : a.closure.records) {
    json c = {{"name", r.name},
              {"expr", r.expr.str()},
              {"origin", to_string(r.origin)},
              {"parent", r.parent},
              {"classification", to_string(r.classification)}};
    if (r.fixed_parameter) {
      c["fixes"] = parameter_name(a, *r.fixed_parameter);
      c["solved"] = terms_json(r.solved);
    }
    constraints.push_back(c);
  }
  json hamiltonians = json::array();
  for (const auto& h : a.system.hamiltonians) {
    hamiltonians.push_back({{"name", h.name}, {"parameter", h.parameter.display()}, {"expr", h.expr.str()}});
  }
  json eom = json::array();
  for (const auto& eq : a.eom.equations) {
    eom.push_back({{"differential", "d" + eq.variable.display()}, {"rhs_terms", terms_json(eq.terms)}});
  }
  eom.push_back({{"differential", "dz"}, {"rhs_terms", terms_json(a.eom.action)}});

  json j = {{"system", {{"name", spec.name}, {"coords", coords}, {"params", params}}},
            {"rank", a.system.split.rank},
            {"momenta", momenta},
            {"constraints", constraints},
            {"hamiltonians", hamiltonians},
            {"eom", eom},
            {"assumptions", a.closure.assumptions}};
  return j.dump(indent);
}

std::vector<ReportConstraint> report_constraints(const Analysis& a) {
  std::vector<ReportConstraint> out;
  for (const auto& r : a.closure.records) out.push_back({r.name, r.expr, r.origin, r.classification});
  return out;
}

std::vector<ReportConstraint> constraints_from_json(const std::string& json_text, const AtomResolver& resolve) {
  std::vector<ReportConstraint> out;
  try {
    auto j = json::parse(json_text);
    for (const auto& c : j.at("constraints")) {
      out.push_back({c.at("name").get<std::string>(), parse_expr(c.at("expr").get<std::string>(), resolve),
                     origin_from(c.at("origin").get<std::string>()),
                     classification_from(c.at("classification").get<std::string>())});
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed report: ") + e.what());
  } catch (const ExprSyntaxError& e) {
    throw std::invalid_argument(std::string("malformed report expression: ") + e.what());
  }
  return out;
}

}  // namespace hjlab::hj
