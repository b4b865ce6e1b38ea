#include "hjlab/cs/fields.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace hjlab::cs {

namespace {

constexpr cplx I{0, 1};

// Site neighbours along direction i (1 or 2) at distance k.
struct Grid {
  const LatticeConfig& cfg;
  int n;
  explicit Grid(const LatticeConfig& c) : cfg(c), n(c.N) {}
  int shift(int idx, int i, int k) const {
    int x = idx / n, y = idx % n;
    return i == 1 ? cfg.index(x + k, y) : cfg.index(x, y + k);
  }
};

cplx link(const LatticeConfig& cfg, double a) { return std::exp(-2.0 * I * cfg.e * cfg.h * a); }

const RealField& A_of(const LatticeState& s, int i) { return i == 1 ? s.A1 : s.A2; }

RealField centred(const LatticeConfig& cfg, const RealField& f, int i) {
  Grid g(cfg);
  RealField out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    out[k] = (f[g.shift(k, i, 1)] - f[g.shift(k, i, -1)]) / (2 * cfg.h);
  }
  return out;
}

}  // namespace

LatticeState LatticeState::zeros(const LatticeConfig& cfg) {
  auto n = static_cast<std::size_t>(cfg.sites());
  return {ComplexField(n), ComplexField(n), RealField(n), RealField(n), 0};
}

A0Provider zero_a0(const LatticeConfig& cfg) {
  auto n = static_cast<std::size_t>(cfg.sites());
  return [n](double) { return RealField(n, 0.0); };
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

NetChargeOnTorus::NetChargeOnTorus(double q, double tolerance)
    : std::runtime_error("net charge " + sci(q) + " (per sublattice on even N) exceeds " + sci(tolerance) +
                         ": the Gauss law has no solution on the torus; use a charge-balanced packet pair "
                         "displaced by an even number of sites"),
      charge(q) {}

RealField charge_density(const LatticeConfig& cfg, const LatticeState& s) {
  RealField j(s.phi.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    cplx pphi = s.p_phi[k] * s.phi[k];
    j[k] = std::real(I * cfg.e * (std::conj(pphi) - pphi));
  }
  return j;
}

double total_charge(const LatticeConfig& cfg, const LatticeState& s) {
  double q = 0;
  for (double v : charge_density(cfg, s)) q += v;
  return q * cfg.h * cfg.h;
}

std::array<RealField, 2> spatial_current(const LatticeConfig& cfg, const LatticeState& s) {
  Grid g(cfg);
  std::array<RealField, 2> j{RealField(s.phi.size()), RealField(s.phi.size())};
  for (int i = 1; i <= 2; ++i) {
    const auto& A = A_of(s, i);
    for (std::size_t k = 0; k < s.phi.size(); ++k) {
      cplx D = (s.phi[g.shift(k, i, 1)] - s.phi[g.shift(k, i, -1)]) / (2 * cfg.h) + I * cfg.e * A[k] * s.phi[k];
      j[i - 1][k] = std::real(I * cfg.e * (std::conj(s.phi[k]) * D - std::conj(D) * s.phi[k]));
    }
  }
  return j;
}

std::array<RealField, 2> link_current(const LatticeConfig& cfg, const LatticeState& s) {
  Grid g(cfg);
  std::array<RealField, 2> J{RealField(s.phi.size()), RealField(s.phi.size())};
  for (int i = 1; i <= 2; ++i) {
    const auto& A = A_of(s, i);
    for (std::size_t k = 0; k < s.phi.size(); ++k) {
      cplx U = link(cfg, A[k]);
      cplx fwd = s.phi[g.shift(k, i, 1)], bwd = s.phi[g.shift(k, i, -1)];
      cplx z = std::conj(U) * fwd * std::conj(bwd) - U * std::conj(fwd) * bwd;
      J[i - 1][k] = std::real(I * cfg.e * z) / (2 * cfg.h);
    }
  }
  return J;
}

RealField curl(const LatticeConfig& cfg, const RealField& A1, const RealField& A2) {
  auto a = centred(cfg, A2, 1), b = centred(cfg, A1, 2);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
  return a;
}

RealField divergence(const LatticeConfig& cfg, const RealField& f1, const RealField& f2) {
  auto a = centred(cfg, f1, 1), b = centred(cfg, f2, 2);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
  return a;
}

RealField gauss_residual(const LatticeConfig& cfg, const LatticeState& s) {
  auto r = curl(cfg, s.A1, s.A2);
  auto j0 = charge_density(cfg, s);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = cfg.kappa * r[k] - j0[k];
  return r;
}

double l2_norm(const LatticeConfig& cfg, const RealField& r) {
  double sum = 0;
  for (double v : r) sum += v * v;
  return std::sqrt(sum) * cfg.h;
}

ComplexField covariant_laplacian(const LatticeConfig& cfg, const LatticeState& s) {
  Grid g(cfg);
  ComplexField out(s.phi.size());
  double w = 1.0 / (4 * cfg.h * cfg.h);
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    cplx acc = 0;
    for (int i = 1; i <= 2; ++i) {
      const auto& A = A_of(s, i);
      int up = g.shift(k, i, 1), dn = g.shift(k, i, -1);
      acc += std::conj(link(cfg, A[up])) * s.phi[g.shift(k, i, 2)] + link(cfg, A[dn]) * s.phi[g.shift(k, i, -2)] -
             2.0 * s.phi[k];
    }
    out[k] = w * acc;
  }
  return out;
}

double reduced_hamiltonian(const LatticeConfig& cfg, const LatticeState& s) {
  Grid g(cfg);
  double sum = 0;
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    sum += std::norm(s.p_phi[k]) + cfg.m * cfg.m * std::norm(s.phi[k]);
    for (int i = 1; i <= 2; ++i) {
      cplx D = (s.phi[g.shift(k, i, 1)] - link(cfg, A_of(s, i)[k]) * s.phi[g.shift(k, i, -1)]) / (2 * cfg.h);
      sum += std::norm(D);
    }
  }
  return sum * cfg.h * cfg.h;
}

Derivative rhs(const LatticeConfig& cfg, const LatticeState& s, const RealField& a0) {
  const std::size_t n = s.phi.size();
  Derivative d{ComplexField(n), ComplexField(n), ComplexField(n), ComplexField(n), RealField(n), RealField(n)};
  auto lap = covariant_laplacian(cfg, s);
  double m2 = cfg.m * cfg.m;
  for (std::size_t k = 0; k < n; ++k) {
    cplx ie_a0 = I * cfg.e * a0[k];
    cplx phic = std::conj(s.phi[k]), pc = std::conj(s.p_phi[k]);
    d.phi[k] = pc + ie_a0 * s.phi[k];
    d.phic[k] = s.p_phi[k] - ie_a0 * phic;
    d.p_phi[k] = std::conj(lap[k]) - m2 * phic - ie_a0 * s.p_phi[k];
    d.p_phic[k] = lap[k] - m2 * s.phi[k] + ie_a0 * pc;
  }
  auto J = link_current(cfg, s);
  auto g1 = centred(cfg, a0, 1), g2 = centred(cfg, a0, 2);
  for (std::size_t k = 0; k < n; ++k) {
    d.A1[k] = -g1[k] - J[1][k] / cfg.kappa;
    d.A2[k] = -g2[k] + J[0][k] / cfg.kappa;
  }
  return d;
}

double current_div_residual(const LatticeConfig& cfg, const LatticeState& s, const RealField& a0) {
  auto d = rhs(cfg, s, a0);
  auto j = spatial_current(cfg, s);
  auto div = divergence(cfg, j[0], j[1]);
  RealField r(s.phi.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    cplx phic = std::conj(s.phi[k]), pc = std::conj(s.p_phi[k]);
    cplx dj0 = I * cfg.e * (d.p_phic[k] * phic + pc * d.phic[k] - d.p_phi[k] * s.phi[k] - s.p_phi[k] * d.phi[k]);
    r[k] = std::real(dj0) - div[k];
  }
  return l2_norm(cfg, r);
}

void write_snapshot_csv(std::ostream& out, const LatticeConfig& cfg, const LatticeState& s) {
  out << "x,y,A1,A2,re_phi,im_phi,re_p_phi,im_p_phi\n";
  auto old = out.precision(17);
  for (int x = 0; x < cfg.N; ++x) {
    for (int y = 0; y < cfg.N; ++y) {
      int k = cfg.index(x, y);
      out << x << ',' << y << ',' << s.A1[k] << ',' << s.A2[k] << ',' << s.phi[k].real() << ',' << s.phi[k].imag()
          << ',' << s.p_phi[k].real() << ',' << s.p_phi[k].imag() << '\n';
    }
  }
  out.precision(old);
}

}  // namespace hjlab::cs
