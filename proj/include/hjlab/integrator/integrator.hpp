#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjlab/cs/fields.hpp"

namespace hjlab::integrator {

using cs::A0Provider;
using cs::LatticeConfig;
using cs::LatticeState;

struct RunConfig {
  double dt = 0.002;
  int steps = 1000;
  int monitor_every = 10;

  void validate() const;
};

struct Monitors {
  double t = 0;
  double gauss_res = 0;
  double charge = 0;
  double energy = 0;
  double current_div_res = 0;
};

using MonitorSeries = std::vector<Monitors>;

class NonFiniteField : public std::runtime_error {
 public:
  NonFiniteField(const std::string& field, int site, long step);
  std::string field;
  int site;
  long step;
};

class InitialConstraintViolation : public std::runtime_error {
 public:
  explicit InitialConstraintViolation(double norm);
  double norm;
};

/// Classical RK4 over phi, p_phi, A1, A2; A0 is queried at t, t + dt/2, t + dt.
LatticeState step_rk4(const LatticeConfig& cfg, const LatticeState& s, double dt, const A0Provider& a0,
                      long step_index = 0);

Monitors measure(const LatticeConfig& cfg, const LatticeState& s, const A0Provider& a0);

struct RunResult {
  MonitorSeries series;
  LatticeState final_state;
  /// h^2 sum |j0| at t = 0, the scale for relative charge drift.
  double charge_scale = 0;
};

/// Runs `steps` RK4 steps, recording monitors at t = 0 and after every
/// `monitor_every` steps (and after the last one). Each record is also
/// passed to `sink` when set.
RunResult run(const LatticeConfig& cfg, const LatticeState& initial, const RunConfig& rc, const A0Provider& a0,
              const std::function<void(const Monitors&)>& sink = {});

void write_monitor_csv_header(std::ostream& out);
void write_monitor_csv_row(std::ostream& out, const Monitors& m);

struct Drift {
  double energy = 0;       // max |E - E0| / |E0|
  double charge = 0;       // max |Q - Q0| / charge_scale
  double gauss = 0;        // max gauss residual norm
  double gauss_initial = 0;
  double current_div = 0;  // max current-div residual
};

Drift drift_of(const RunResult& r);

struct ConvergenceRow {
  double dt = 0;
  double h = 0;
  int N = 0;
  Drift drift;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// log(d_k / d_{k+1}) / log(step_k / step_{k+1}) for successive rows.
  std::vector<double> energy_orders, gauss_orders, current_div_orders;
};

/// Same initial state and final time T for every dt; dt_list must have at
/// least 3 entries, each half the previous one.
ConvergenceTable convergence_study(const LatticeConfig& cfg, const LatticeState& initial, double T,
                                   const std::vector<double>& dt_list, const A0Provider& a0);

/// h-refinement on a fixed domain N*h: for every N the initial state is
/// rebuilt by `make_state` and run to time T with step dt.
ConvergenceTable spatial_study(const LatticeConfig& base, const std::vector<int>& Ns, double T, double dt,
                               const std::function<LatticeState(const LatticeConfig&)>& make_state,
                               const std::function<A0Provider(const LatticeConfig&)>& make_a0);

}  // namespace hjlab::integrator
