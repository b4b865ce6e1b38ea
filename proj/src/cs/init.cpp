#include <cmath>

#include "hjlab/cs/fields.hpp"

namespace hjlab::cs {

namespace {

// Parity classes of the stride-2 stencils: 4 on even N, 1 on odd N.
int parity_class(const LatticeConfig& cfg, int k) {
  if (cfg.N % 2) return 0;
  return 2 * ((k / cfg.N) % 2) + (k % cfg.N) % 2;
}

void project_null_space(const LatticeConfig& cfg, RealField& f) {
  double sum[4] = {0, 0, 0, 0};
  int count[4] = {0, 0, 0, 0};
  for (std::size_t k = 0; k < f.size(); ++k) {
    sum[parity_class(cfg, k)] += f[k];
    count[parity_class(cfg, k)]++;
  }
  for (std::size_t k = 0; k < f.size(); ++k) f[k] -= sum[parity_class(cfg, k)] / count[parity_class(cfg, k)];
}

// -(C1 C1 + C2 C2), positive semidefinite.
RealField apply_neg_wide_laplacian(const LatticeConfig& cfg, const RealField& f) {
  RealField c1 = divergence(cfg, f, RealField(f.size(), 0.0));
  RealField c2 = divergence(cfg, RealField(f.size(), 0.0), f);
  RealField a = divergence(cfg, c1, c2);
  for (double& v : a) v = -v;
  return a;
}

double dot(const RealField& a, const RealField& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

RealField solve_wide_poisson(const LatticeConfig& cfg, const RealField& rhs, double tolerance) {
  RealField b = rhs;
  for (double& v : b) v = -v;
  project_null_space(cfg, b);
  RealField x(b.size(), 0.0), r = b, p = r;
  double rr = dot(r, r);
  double stop = tolerance * tolerance * std::max(1.0, dot(b, b));
  for (std::size_t it = 0; it < 10 * b.size() && rr > stop; ++it) {
    RealField Ap = apply_neg_wide_laplacian(cfg, p);
    double alpha = rr / dot(p, Ap);
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
    }
    double next = dot(r, r);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = r[k] + (next / rr) * p[k];
    rr = next;
  }
  project_null_space(cfg, x);
  return x;
}

LatticeState init_gauss_consistent(const LatticeConfig& cfg, const PacketSpec& packet) {
  cfg.validate();
  auto s = LatticeState::zeros(cfg);
  const int N = cfg.N;
  const double L = N * cfg.h;
  const double omega = std::sqrt(cfg.m * cfg.m + packet.momentum[0] * packet.momentum[0] +
                                 packet.momentum[1] * packet.momentum[1]);
  const cplx I{0, 1};

  // Gaussian summed over the nearest periodic images, times a plane wave in
  // absolute position: smooth on the torus when momentum * N * h is a
  // multiple of 2 pi.
  ComplexField g(s.phi.size());
  for (int x = 0; x < N; ++x) {
    for (int y = 0; y < N; ++y) {
      double env = 0;
      for (int a = -1; a <= 1; ++a) {
        for (int b = -1; b <= 1; ++b) {
          double dx = x * cfg.h - packet.center[0] + a * L, dy = y * cfg.h - packet.center[1] + b * L;
          env += std::exp(-(dx * dx + dy * dy) / (2 * packet.width * packet.width));
        }
      }
      double phase = packet.momentum[0] * x * cfg.h + packet.momentum[1] * y * cfg.h;
      g[cfg.index(x, y)] = packet.amplitude * env * std::exp(I * phase);
    }
  }
  // packet: phidot = -i omega phi; antipacket: phidot = +i omega phi
  int sx = static_cast<int>(std::lround(packet.separation[0] / cfg.h));
  int sy = static_cast<int>(std::lround(packet.separation[1] / cfg.h));
  for (int x = 0; x < N; ++x) {
    for (int y = 0; y < N; ++y) {
      int k = cfg.index(x, y);
      cplx phidot = -I * omega * g[k];
      s.phi[k] = g[k];
      if (packet.pair) {
        cplx partner = g[cfg.index(x - sx, y - sy)];
        s.phi[k] += partner;
        phidot += I * omega * partner;
      }
      s.p_phi[k] = std::conj(phidot);
    }
  }

  RealField j0 = charge_density(cfg, s);
  double tolerance = 1e-12 * N * N;
  double q[4] = {0, 0, 0, 0};
  for (std::size_t k = 0; k < j0.size(); ++k) q[parity_class(cfg, k)] += j0[k] * cfg.h * cfg.h;
  for (double v : q) {
    if (std::abs(v) >= tolerance) throw NetChargeOnTorus(v, tolerance);
  }
  if (cfg.e == 0) return s;

  for (double& v : j0) v /= cfg.kappa;
  RealField chi = solve_wide_poisson(cfg, j0);
  RealField zero(chi.size(), 0.0);
  RealField c1 = divergence(cfg, chi, zero), c2 = divergence(cfg, zero, chi);
  for (std::size_t k = 0; k < chi.size(); ++k) {
    s.A1[k] = -c2[k];
    s.A2[k] = c1[k];
  }
  return s;
}

}  // namespace hjlab::cs
