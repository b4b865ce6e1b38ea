#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "hjlab/integrator/config.hpp"

using namespace hjlab;
using namespace hjlab::integrator;

namespace {

LatticeConfig lattice(int N, double h, double e) {
  LatticeConfig c;
  c.N = N;
  c.h = h;
  c.e = e;
  c.kappa = 1;
  c.m = 1.5;
  return c;
}

double state_distance(const LatticeState& a, const LatticeState& b) {
  double d = 0;
  for (std::size_t k = 0; k < a.phi.size(); ++k) {
    d = std::max({d, std::abs(a.phi[k] - b.phi[k]), std::abs(a.p_phi[k] - b.p_phi[k]), std::abs(a.A1[k] - b.A1[k]),
                  std::abs(a.A2[k] - b.A2[k])});
  }
  return d;
}

}  // namespace

TEST_CASE("zero state stays zero") {
  auto c = lattice(6, 0.5, 0.5);
  auto z = LatticeState::zeros(c);
  auto s = step_rk4(c, z, 0.01, cs::zero_a0(c));
  CHECK(state_distance(s, z) == 0);
  CHECK(s.t == doctest::Approx(0.01));
}

TEST_CASE("homogeneous field follows the analytic oscillator at fourth order") {
  // e = 0, constant phi: phidot = p*, pdot = -m^2 phi*, so
  // phi(t) = phi0 cos(mt) + (p0*/m) sin(mt).
  auto c = lattice(4, 0.5, 0);
  const cs::cplx phi0{0.3, -0.2}, p0{0.1, 0.4};
  const double T = 2;
  double err[2];
  for (int r = 0; r < 2; ++r) {
    double dt = 0.05 / (1 << r);
    auto s = LatticeState::zeros(c);
    for (auto& v : s.phi) v = phi0;
    for (auto& v : s.p_phi) v = p0;
    for (int n = 0; n < std::lround(T / dt); ++n) s = step_rk4(c, s, dt, cs::zero_a0(c));
    cs::cplx exact = phi0 * std::cos(c.m * T) + std::conj(p0) / c.m * std::sin(c.m * T);
    err[r] = std::abs(s.phi[0] - exact);
    for (const auto& v : s.phi) CHECK(v == s.phi[0]);
  }
  CHECK(std::log2(err[0] / err[1]) == doctest::Approx(4).epsilon(0.05));
}

TEST_CASE("a step followed by the reversed step returns to high order") {
  auto c = lattice(8, 0.5, 0.5);
  cs::PacketSpec p;
  p.center = {1.5, 1.5};
  auto s0 = cs::init_gauss_consistent(c, p);
  double err[2];
  for (int r = 0; r < 2; ++r) {
    double dt = 0.1 / (1 << r);
    auto fwd = step_rk4(c, s0, dt, cs::zero_a0(c));
    auto back = step_rk4(c, fwd, -dt, cs::zero_a0(c));
    err[r] = state_distance(back, s0);
  }
  // O(dt^5) in general; the linear part cancels one more order, since
  // R(z) R(-z) = 1 - z^6 / 72 + ...
  CHECK(std::log2(err[0] / err[1]) > 4.8);
  CHECK(err[0] < 1e-5);
}

TEST_CASE("monitor stride arithmetic and time stamps") {
  auto c = lattice(8, 0.5, 0.5);
  auto s = cs::init_gauss_consistent(c, {});
  auto r = run(c, s, {0.01, 100, 10}, cs::zero_a0(c));
  CHECK(r.series.size() == 100 / 10 + 1);
  for (std::size_t k = 1; k < r.series.size(); ++k) CHECK(r.series[k].t > r.series[k - 1].t);
  CHECK(r.series.back().t == doctest::Approx(1.0));
  // a partial last stride still records the final state
  CHECK(run(c, s, {0.01, 25, 10}, cs::zero_a0(c)).series.size() == 4);
  int sunk = 0;
  run(c, s, {0.01, 20, 5}, cs::zero_a0(c), [&](const Monitors&) { ++sunk; });
  CHECK(sunk == 5);
}

TEST_CASE("uncoupled field: Gauss residual and charge are exactly zero") {
  auto c = lattice(8, 0.5, 0);
  cs::PacketSpec p;
  p.pair = false;
  auto s = cs::init_gauss_consistent(c, p);
  auto r = run(c, s, {0.01, 1000, 100}, cs::zero_a0(c));
  for (const auto& m : r.series) {
    CHECK(m.gauss_res == 0);
    CHECK(m.charge == 0);
  }
  auto d = drift_of(r);
  CHECK(d.energy < 1e-8);
}

TEST_CASE("run rejects inconsistent initial data and non-finite fields") {
  auto c = lattice(6, 0.5, 0.5);
  auto s = cs::init_gauss_consistent(c, {});
  auto bad = s;
  bad.A1[3] += 0.1;
  CHECK_THROWS_AS(run(c, bad, {0.01, 10, 1}, cs::zero_a0(c)), InitialConstraintViolation);

  auto nan = s;
  nan.p_phi[7] = {std::numeric_limits<double>::quiet_NaN(), 0};
  try {
    step_rk4(c, nan, 0.01, cs::zero_a0(c), 42);
    FAIL("expected NonFiniteField");
  } catch (const NonFiniteField& e) {
    CHECK(e.step == 42);
    CHECK(e.site >= 0);
  }
  CHECK_THROWS_AS(run(c, s, {0.0, 10, 1}, cs::zero_a0(c)), std::invalid_argument);
}

TEST_CASE("convergence study validates its step list and fits orders") {
  auto c = lattice(8, 0.5, 0.5);
  auto s = cs::init_gauss_consistent(c, {});
  CHECK_THROWS_AS(convergence_study(c, s, 0.1, {0.01, 0.005}, cs::zero_a0(c)), std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(c, s, 0.1, {0.01, 0.004, 0.002}, cs::zero_a0(c)), std::invalid_argument);
  auto t = convergence_study(c, s, 0.4, {0.04, 0.02, 0.01}, cs::zero_a0(c));
  CHECK(t.rows.size() == 3);
  CHECK(t.energy_orders.size() == 2);
  for (double o : t.energy_orders) CHECK(o > 3.5);
  for (double o : t.gauss_orders) CHECK(o > 3.5);
}

TEST_CASE("A0 is a gauge choice: gauge-invariant monitors do not depend on it") {
  auto c = lattice(8, 0.5, 0.7);
  auto s = cs::init_gauss_consistent(c, {});
  RunConfig rc{0.005, 200, 50};
  auto a = run(c, s, rc, cs::zero_a0(c));
  auto b = run(c, s, rc, make_a0(c, "expr x*y/5 - x/10 + t/2"));
  REQUIRE(a.series.size() == b.series.size());
  for (std::size_t k = 0; k < a.series.size(); ++k) {
    CHECK(std::abs(a.series[k].energy - b.series[k].energy) < 1e-8);
    CHECK(std::abs(a.series[k].charge - b.series[k].charge) < 1e-9);
    CHECK(b.series[k].gauss_res < 1e-8);
  }
  auto ja = cs::charge_density(c, a.final_state), jb = cs::charge_density(c, b.final_state);
  for (std::size_t k = 0; k < ja.size(); ++k) CHECK(std::abs(ja[k] - jb[k]) < 1e-8);
  for (std::size_t k = 0; k < ja.size(); ++k) {
    CHECK(std::abs(std::abs(a.final_state.phi[k]) - std::abs(b.final_state.phi[k])) < 1e-8);
  }
}

TEST_CASE("config parsing") {
  auto c = parse_config(R"({"N": 12, "h": 0.25, "e": 0, "packet": {"width": 1.5, "pair": false},
                            "run": {"dt": 0.01, "steps": 50, "monitor_every": 5}, "a0_mode": "expr x + t"})");
  CHECK(c.lattice.N == 12);
  CHECK(c.lattice.h == 0.25);
  CHECK(c.lattice.e == 0);
  CHECK(c.lattice.kappa == 1);
  CHECK(c.packet.width == 1.5);
  CHECK_FALSE(c.packet.pair);
  CHECK(c.run.steps == 50);
  auto round = parse_config(to_json(c));
  CHECK(to_json(round) == to_json(c));
  auto a0 = make_a0(c.lattice, c.a0_mode)(2.0);
  CHECK(a0[c.lattice.index(3, 1)] == doctest::Approx(3 * 0.25 + 2));

  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"N": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"kappa": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"N": "many"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"a0_mode": "coulomb"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"a0_mode": "expr x +"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"a0_mode": "expr q"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"run": {"monitor_every": 0}})"), ConfigError);
}

TEST_CASE("monitor CSV layout") {
  std::ostringstream out;
  write_monitor_csv_header(out);
  write_monitor_csv_row(out, {0.5, 1e-13, 0, 4.25, 0.01});
  CHECK(out.str().rfind("t,gauss_res,charge,energy,current_div_res\n0.5,", 0) == 0);
}
