#pragma once

#include <string>
#include <vector>

#include "hjlab/expr/expr_io.hpp"
#include "hjlab/hj/engine.hpp"

namespace hjlab::hj {

/// Plain-text report: momenta, rank, H' list, equations of motion,
/// constraint records and assumptions. Deterministic.
std::string render_text(const Analysis& a);

/// JSON report:
///   {system: {name, coords, params}, rank, momenta: [{coord, expr}],
///    constraints: [{name, expr, origin, parent, classification, fixes, solved}],
///    hamiltonians: [{name, parameter, expr}],
///    eom: [{differential, rhs_terms: [{wrt, expr}]}], assumptions: [text]}
std::string render_json(const Analysis& a, int indent = 2);

/// The part of a constraint record that survives the JSON round trip.
struct ReportConstraint {
  std::string name;
  Expr expr;
  Origin origin = Origin::primary;
  Classification classification = Classification::pending;

  friend bool operator==(const ReportConstraint&, const ReportConstraint&) = default;
};

std::vector<ReportConstraint> report_constraints(const Analysis& a);

/// Reads the constraint list back from render_json output. Throws
/// std::invalid_argument on malformed input.
std::vector<ReportConstraint> constraints_from_json(const std::string& json_text,
                                                    const AtomResolver& resolve = resolve_unique);

}  // namespace hjlab::hj
