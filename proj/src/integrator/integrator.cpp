#include "hjlab/integrator/integrator.hpp"

#include <cmath>
#include <ostream>

namespace hjlab::integrator {

void RunConfig::validate() const {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  if (steps < 1) throw std::invalid_argument("steps must be at least 1");
  if (monitor_every < 1) throw std::invalid_argument("monitor_every must be at least 1");
}

NonFiniteField::NonFiniteField(const std::string& f, int s, long st)
    : std::runtime_error("non-finite " + f + " at site " + std::to_string(s) + " after step " + std::to_string(st)),
      field(f),
      site(s),
      step(st) {}

InitialConstraintViolation::InitialConstraintViolation(double n)
    : std::runtime_error("initial Gauss residual norm " + std::to_string(n) + " is not below 1e-8"), norm(n) {}

namespace {

// s + c * d over the evolved arrays
LatticeState axpy(const LatticeState& s, double c, const cs::Derivative& d) {
  LatticeState out = s;
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    out.phi[k] += c * d.phi[k];
    out.p_phi[k] += c * d.p_phi[k];
    out.A1[k] += c * d.A1[k];
    out.A2[k] += c * d.A2[k];
  }
  return out;
}

void check_finite(const LatticeState& s, long step) {
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    int site = static_cast<int>(k);
    if (!std::isfinite(s.phi[k].real()) || !std::isfinite(s.phi[k].imag())) throw NonFiniteField("phi", site, step);
    if (!std::isfinite(s.p_phi[k].real()) || !std::isfinite(s.p_phi[k].imag())) {
      throw NonFiniteField("p_phi", site, step);
    }
    if (!std::isfinite(s.A1[k])) throw NonFiniteField("A1", site, step);
    if (!std::isfinite(s.A2[k])) throw NonFiniteField("A2", site, step);
  }
}

std::vector<double> orders(const std::vector<ConvergenceRow>& rows, double Drift::*field, bool by_h) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    double a = rows[k].drift.*field, b = rows[k + 1].drift.*field;
    double x = by_h ? rows[k].h / rows[k + 1].h : rows[k].dt / rows[k + 1].dt;
    out.push_back(std::log(a / b) / std::log(x));
  }
  return out;
}

}  // namespace

LatticeState step_rk4(const LatticeConfig& cfg, const LatticeState& s, double dt, const A0Provider& a0,
                      long step_index) {
  auto a_start = a0(s.t), a_mid = a0(s.t + dt / 2), a_end = a0(s.t + dt);
  auto k1 = cs::rhs(cfg, s, a_start);
  auto k2 = cs::rhs(cfg, axpy(s, dt / 2, k1), a_mid);
  auto k3 = cs::rhs(cfg, axpy(s, dt / 2, k2), a_mid);
  auto k4 = cs::rhs(cfg, axpy(s, dt, k3), a_end);
  LatticeState out = s;
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    out.phi[k] += dt / 6 * (k1.phi[k] + 2.0 * k2.phi[k] + 2.0 * k3.phi[k] + k4.phi[k]);
    out.p_phi[k] += dt / 6 * (k1.p_phi[k] + 2.0 * k2.p_phi[k] + 2.0 * k3.p_phi[k] + k4.p_phi[k]);
    out.A1[k] += dt / 6 * (k1.A1[k] + 2 * k2.A1[k] + 2 * k3.A1[k] + k4.A1[k]);
    out.A2[k] += dt / 6 * (k1.A2[k] + 2 * k2.A2[k] + 2 * k3.A2[k] + k4.A2[k]);
  }
  out.t = s.t + dt;
  check_finite(out, step_index);
  return out;
}

Monitors measure(const LatticeConfig& cfg, const LatticeState& s, const A0Provider& a0) {
  return {s.t, cs::l2_norm(cfg, cs::gauss_residual(cfg, s)), cs::total_charge(cfg, s),
          cs::reduced_hamiltonian(cfg, s), cs::current_div_residual(cfg, s, a0(s.t))};
}

RunResult run(const LatticeConfig& cfg, const LatticeState& initial, const RunConfig& rc, const A0Provider& a0,
              const std::function<void(const Monitors&)>& sink) {
  cfg.validate();
  rc.validate();
  RunResult out{{}, initial, 0};
  for (double v : cs::charge_density(cfg, initial)) out.charge_scale += std::abs(v);
  out.charge_scale *= cfg.h * cfg.h;

  auto record = [&](const LatticeState& s) {
    out.series.push_back(measure(cfg, s, a0));
    if (sink) sink(out.series.back());
  };
  record(initial);
  if (out.series.back().gauss_res >= 1e-8) throw InitialConstraintViolation(out.series.back().gauss_res);

  LatticeState s = initial;
  for (long n = 1; n <= rc.steps; ++n) {
    s = step_rk4(cfg, s, rc.dt, a0, n);
    // times from the step count, so stamps do not accumulate rounding
    s.t = initial.t + n * rc.dt;
    if (n % rc.monitor_every == 0 || n == rc.steps) record(s);
  }
  out.final_state = std::move(s);
  return out;
}

void write_monitor_csv_header(std::ostream& out) { out << "t,gauss_res,charge,energy,current_div_res\n"; }

void write_monitor_csv_row(std::ostream& out, const Monitors& m) {
  auto old = out.precision(17);
  out << m.t << ',' << m.gauss_res << ',' << m.charge << ',' << m.energy << ',' << m.current_div_res << '\n';
  out.precision(old);
}

Drift drift_of(const RunResult& r) {
  Drift d;
  const auto& first = r.series.front();
  d.gauss_initial = first.gauss_res;
  for (const auto& m : r.series) {
    d.energy = std::max(d.energy, std::abs(m.energy - first.energy) / std::abs(first.energy));
    if (r.charge_scale > 0) d.charge = std::max(d.charge, std::abs(m.charge - first.charge) / r.charge_scale);
    d.gauss = std::max(d.gauss, m.gauss_res);
    d.current_div = std::max(d.current_div, m.current_div_res);
  }
  return d;
}

ConvergenceTable convergence_study(const LatticeConfig& cfg, const LatticeState& initial, double T,
                                   const std::vector<double>& dt_list, const A0Provider& a0) {
  if (dt_list.size() < 3) throw std::invalid_argument("convergence study needs at least 3 time steps");
  for (std::size_t k = 0; k + 1 < dt_list.size(); ++k) {
    if (std::abs(dt_list[k] - 2 * dt_list[k + 1]) > 1e-12 * dt_list[k]) {
      throw std::invalid_argument("each time step must be half the previous one");
    }
  }
  ConvergenceTable table;
  for (double dt : dt_list) {
    RunConfig rc{dt, static_cast<int>(std::lround(T / dt)), 1};
    table.rows.push_back({dt, cfg.h, cfg.N, drift_of(run(cfg, initial, rc, a0))});
  }
  table.energy_orders = orders(table.rows, &Drift::energy, false);
  table.gauss_orders = orders(table.rows, &Drift::gauss, false);
  table.current_div_orders = orders(table.rows, &Drift::current_div, false);
  return table;
}

ConvergenceTable spatial_study(const LatticeConfig& base, const std::vector<int>& Ns, double T, double dt,
                               const std::function<LatticeState(const LatticeConfig&)>& make_state,
                               const std::function<A0Provider(const LatticeConfig&)>& make_a0) {
  ConvergenceTable table;
  const double L = base.N * base.h;
  for (int N : Ns) {
    LatticeConfig cfg = base;
    cfg.N = N;
    cfg.h = L / N;
    RunConfig rc{dt, static_cast<int>(std::lround(T / dt)), 1};
    table.rows.push_back({dt, cfg.h, N, drift_of(run(cfg, make_state(cfg), rc, make_a0(cfg)))});
  }
  table.energy_orders = orders(table.rows, &Drift::energy, true);
  table.gauss_orders = orders(table.rows, &Drift::gauss, true);
  table.current_div_orders = orders(table.rows, &Drift::current_div, true);
  return table;
}

}  // namespace hjlab::integrator
