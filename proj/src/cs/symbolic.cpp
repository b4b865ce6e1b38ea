#include <string>

#include "hjlab/cs/lattice.hpp"

namespace hjlab::cs {

void LatticeConfig::validate() const {
  if (N < 2) throw std::invalid_argument("lattice size N must be at least 2");
  if (!(h > 0)) throw std::invalid_argument("lattice spacing h must be positive");
  if (kappa == 0) throw std::invalid_argument("kappa must be nonzero");
  if (m < 0) throw std::invalid_argument("mass m must be non-negative");
}

TooLargeForSymbolic::TooLargeForSymbolic(int N)
    : std::invalid_argument("symbolic lattice needs N in {2, 3}, got N=" + std::to_string(N)) {}

Assignment SymbolicLattice::parameter_values() const {
  return {{kappa, config.kappa}, {e, config.e}, {m, config.m}, {h, config.h}};
}

Expr SymbolicLattice::charge() const { return coupled ? Expr(e) : Expr(); }

Expr SymbolicLattice::link(int x, int y, int i) const {
  const auto& u = at(x, y).U[i - 1];
  return u ? Expr(*u) : Expr(1);
}

Expr SymbolicLattice::link_inverse(int x, int y, int i) const {
  const auto& u = at(x, y).U[i - 1];
  return u ? Expr(*u).inverse() : Expr(1);
}

namespace {

Expr half() { return Expr(ComplexRational::fraction(1, 2)); }

// Unit step in direction i (1 or 2).
int dx(int i) { return i == 1 ? 1 : 0; }
int dy(int i) { return i == 2 ? 1 : 0; }

}  // namespace

SymbolicLattice build_symbolic(const LatticeConfig& config) {
  config.validate();
  if (config.N != 2 && config.N != 3) throw TooLargeForSymbolic(config.N);

  SymbolicLattice lat{config, {}, Atom::intern("kappa", AtomKind::parameter),
                      Atom::intern("e", AtomKind::parameter), Atom::intern("m", AtomKind::parameter),
                      Atom::intern("h", AtomKind::parameter), config.e != 0, {}};
  auto& spec = lat.spec;
  spec.name = "chern-simons-scalar N=" + std::to_string(config.N);
  spec.add_parameter("kappa");
  if (lat.coupled) spec.add_parameter("e");
  spec.add_parameter("m");
  spec.add_parameter("h");

  ComplexRational h = ComplexRational::from_double(config.h);
  ComplexRational weight = (h * h).inverse();
  const int N = config.N;

  for (int x = 0; x < N; ++x) {
    for (int y = 0; y < N; ++y) {
      Site site{x, y};
      std::vector<Atom> A, pi;
      for (int mu = 0; mu < 3; ++mu) {
        auto& d = spec.add_coordinate("A" + std::to_string(mu), site, weight, "pi" + std::to_string(mu));
        A.push_back(d.coordinate);
        pi.push_back(d.momentum);
      }
      auto [phi, phic] = spec.add_complex_coordinate("phi", site, weight);
      SymbolicLattice::SiteAtoms s{{A[0], A[1], A[2]},
                                   {pi[0], pi[1], pi[2]},
                                   phi,
                                   phic,
                                   spec.find_coordinate(phi)->momentum,
                                   spec.find_coordinate(phic)->momentum,
                                   {}};
      lat.sites.push_back(s);
    }
  }
  if (lat.coupled) {
    Expr factor = Expr(-2) * Expr::i() * Expr(lat.e) * Expr(lat.h);
    for (int x = 0; x < N; ++x) {
      for (int y = 0; y < N; ++y) {
        auto& s = lat.sites[config.index(x, y)];
        for (int i = 1; i <= 2; ++i) {
          s.U[i - 1] = Atom::exponential("U" + std::to_string(i), Site{x, y}, factor * Expr(s.A[i]));
        }
      }
    }
  }

  Expr kappa(lat.kappa), m(lat.m), e = lat.charge();
  Expr inv2h = half() * Expr(lat.h).inverse();
  auto vel = [&](Atom q) { return Expr(spec.find_coordinate(q)->velocity); };

  Expr density;
  for (int x = 0; x < N; ++x) {
    for (int y = 0; y < N; ++y) {
      const auto& s = lat.at(x, y);
      Expr A0(s.A[0]), A1(s.A[1]), A2(s.A[2]), phi(s.phi), phic(s.phic);

      // (kappa/2) eps A d A, time-derivative part
      density += half() * kappa * (A2 * vel(s.A[1]) - A1 * vel(s.A[2]));
      // spatial part after summation by parts: -kappa A0 curl A
      Expr curl = inv2h * (Expr(lat.at(x + 1, y).A[2]) - Expr(lat.at(x - 1, y).A[2]) -
                           Expr(lat.at(x, y + 1).A[1]) + Expr(lat.at(x, y - 1).A[1]));
      density -= kappa * A0 * curl;

      Expr ie = Expr::i() * e;
      density += (vel(s.phic) + ie * A0 * phic) * (vel(s.phi) - ie * A0 * phi);
      for (int i = 1; i <= 2; ++i) {
        const auto& fwd = lat.at(x + dx(i), y + dy(i));
        const auto& bwd = lat.at(x - dx(i), y - dy(i));
        Expr D = inv2h * (Expr(fwd.phi) - lat.link(x, y, i) * Expr(bwd.phi));
        Expr Dc = inv2h * (Expr(fwd.phic) - lat.link_inverse(x, y, i) * Expr(bwd.phic));
        density -= D * Dc;
      }
      density -= m * m * phic * phi;
    }
  }
  spec.lagrangian = Expr(h * h) * density;
  spec.validate();
  return lat;
}

ExpectedForms expected_forms(const SymbolicLattice& lat) {
  const int N = lat.config.N;
  ComplexRational h = ComplexRational::from_double(lat.config.h);
  Expr kappa(lat.kappa), m(lat.m), ie = Expr::i() * lat.charge();
  Expr inv2h = half() * Expr(lat.h).inverse();
  Expr inv4h2 = inv2h * inv2h;

  auto A = [&](int x, int y, int mu) { return Expr(lat.at(x, y).A[mu]); };
  auto phi = [&](int x, int y) { return Expr(lat.at(x, y).phi); };
  auto phic = [&](int x, int y) { return Expr(lat.at(x, y).phic); };
  auto C = [&](int x, int y, int i, int mu) {  // centred difference of A^mu along i
    return inv2h * (A(x + dx(i), y + dy(i), mu) - A(x - dx(i), y - dy(i), mu));
  };

  ExpectedForms out;
  Expr h0;
  for (int x = 0; x < N; ++x) {
    for (int y = 0; y < N; ++y) {
      const auto& s = lat.at(x, y);
      Expr p(s.p_phi), pc(s.p_phic);
      Expr curl = C(x, y, 1, 2) - C(x, y, 2, 1);
      Expr j0 = ie * (pc * phic(x, y) - p * phi(x, y));

      // link currents J_i = -dE/dA^i at this site
      std::array<Expr, 2> J;
      Expr grad, lap, lapc;
      for (int i = 1; i <= 2; ++i) {
        int sx = dx(i), sy = dy(i);
        Expr U = lat.link(x, y, i), Ui = lat.link_inverse(x, y, i);
        J[i - 1] = ie * inv2h * (Ui * phi(x + sx, y + sy) * phic(x - sx, y - sy) -
                                 U * phic(x + sx, y + sy) * phi(x - sx, y - sy));
        grad += inv4h2 * (phi(x + sx, y + sy) - U * phi(x - sx, y - sy)) *
                (phic(x + sx, y + sy) - Ui * phic(x - sx, y - sy));
        lap += inv4h2 * (lat.link_inverse(x + sx, y + sy, i) * phi(x + 2 * sx, y + 2 * sy) +
                         lat.link(x - sx, y - sy, i) * phi(x - 2 * sx, y - 2 * sy) - Expr(2) * phi(x, y));
        lapc += inv4h2 * (lat.link(x + sx, y + sy, i) * phic(x + 2 * sx, y + 2 * sy) +
                          lat.link_inverse(x - sx, y - sy, i) * phic(x - 2 * sx, y - 2 * sy) -
                          Expr(2) * phic(x, y));
      }

      h0 += p * pc + A(x, y, 0) * (kappa * curl - j0) + grad + m * m * phic(x, y) * phi(x, y);

      ExpectedForms::Site site;
      site.primaries = {Expr(s.pi[0]), Expr(s.pi[1]) - half() * kappa * A(x, y, 2),
                        Expr(s.pi[2]) + half() * kappa * A(x, y, 1)};
      site.secondary = kappa * curl - j0;
      Expr inv_kappa = kappa.inverse();
      site.fixed_dA1 = -C(x, y, 1, 0) - J[1] * inv_kappa;
      site.fixed_dA2 = -C(x, y, 2, 0) + J[0] * inv_kappa;
      out.sites.push_back(site);

      Expr A0 = A(x, y, 0);
      out.eom_dx0[s.phi] = pc + ie * A0 * phi(x, y);
      out.eom_dx0[s.phic] = p - ie * A0 * phic(x, y);
      out.eom_dx0[s.p_phi] = lapc - m * m * phic(x, y) - ie * A0 * p;
      out.eom_dx0[s.p_phic] = lap - m * m * phi(x, y) + ie * A0 * pc;
      out.eom_dx0[s.pi[0]] = -(kappa * curl - j0);
      out.eom_dx0[s.pi[1]] = -kappa * C(x, y, 2, 0) + J[0];
      out.eom_dx0[s.pi[2]] = kappa * C(x, y, 1, 0) + J[1];
      out.eom_gauge[{s.pi[1], s.A[2]}] = -half() * kappa;
      out.eom_gauge[{s.pi[2], s.A[1]}] = half() * kappa;
    }
  }
  out.h0 = Expr(h * h) * h0;
  return out;
}

}  // namespace hjlab::cs
