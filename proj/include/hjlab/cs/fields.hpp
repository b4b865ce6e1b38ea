#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjlab/cs/lattice.hpp"

namespace hjlab::cs {

using cplx = std::complex<double>;
using RealField = std::vector<double>;
using ComplexField = std::vector<cplx>;

/// Evolved fields. The conjugate sector is implied: phi* = conj(phi) and
/// p_phi* = conj(p_phi). pi0..pi2 are not stored; the constraints fix them.
struct LatticeState {
  ComplexField phi, p_phi;
  RealField A1, A2;
  double t = 0;

  static LatticeState zeros(const LatticeConfig& cfg);
};

/// Time derivatives of every field, the conjugate sector computed from its
/// own equations rather than by conjugation.
struct Derivative {
  ComplexField phi, phic, p_phi, p_phic;
  RealField A1, A2;
};

/// Gauge function A0 at time t, one value per site.
using A0Provider = std::function<RealField(double t)>;
A0Provider zero_a0(const LatticeConfig& cfg);

class NetChargeOnTorus : public std::runtime_error {
 public:
  NetChargeOnTorus(double charge, double tolerance);
  double charge;
};

/// j0 = ie(p_phi* phi* - p_phi phi) = 2e Im(p_phi phi).
RealField charge_density(const LatticeConfig& cfg, const LatticeState& s);
double total_charge(const LatticeConfig& cfg, const LatticeState& s);

/// Continuum-form current j_i = ie(phi* D_i phi - (D_i phi)* phi) with
/// centred differences and D_i = d_i + ieA^i. Lower index: the physical
/// flux is j^i = -j_i, so continuity reads d_t j0 = div j.
std::array<RealField, 2> spatial_current(const LatticeConfig& cfg, const LatticeState& s);

/// Exactly conserved link current J_i = -dE/dA^i on the stride-2 links.
std::array<RealField, 2> link_current(const LatticeConfig& cfg, const LatticeState& s);

/// Centred curl C1 A2 - C2 A1.
RealField curl(const LatticeConfig& cfg, const RealField& A1, const RealField& A2);
/// Centred divergence C1 f1 + C2 f2.
RealField divergence(const LatticeConfig& cfg, const RealField& f1, const RealField& f2);

/// kappa curl A - j0 per site.
RealField gauss_residual(const LatticeConfig& cfg, const LatticeState& s);
/// sqrt(h^2 sum r^2).
double l2_norm(const LatticeConfig& cfg, const RealField& r);

/// Covariant Laplacian on the stride-2 links.
ComplexField covariant_laplacian(const LatticeConfig& cfg, const LatticeState& s);

/// h^2 sum [|p_phi|^2 + sum_i |D_i phi|^2 + m^2 |phi|^2].
double reduced_hamiltonian(const LatticeConfig& cfg, const LatticeState& s);

Derivative rhs(const LatticeConfig& cfg, const LatticeState& s, const RealField& a0);

/// sqrt(h^2 sum (d_t j0 - div j)^2), d_t j0 taken from rhs, j from spatial_current.
double current_div_residual(const LatticeConfig& cfg, const LatticeState& s, const RealField& a0);

struct PacketSpec {
  std::array<double, 2> center{2.0, 2.0};  // physical units
  double width = 0.75;
  /// Plane-wave momentum; a multiple of 2 pi / (N h) keeps the data smooth.
  std::array<double, 2> momentum{0.7853981633974483, 0.0};
  double amplitude = 0.5;
  /// Adds an antipacket (opposite frequency) displaced by `separation`,
  /// rounded to whole sites.
  bool pair = true;
  std::array<double, 2> separation{4.0, 0.0};
};

/// Gaussian packet(s) with p_phi = conj(d phi/dt), A from the Poisson solve of
/// the Gauss law. Throws NetChargeOnTorus when the charge on any of the
/// independent sublattices reaches 1e-12 * N^2.
LatticeState init_gauss_consistent(const LatticeConfig& cfg, const PacketSpec& packet);

/// Solves (C1 C1 + C2 C2) chi = rhs by conjugate gradients, with the
/// operator's null space projected out of rhs.
RealField solve_wide_poisson(const LatticeConfig& cfg, const RealField& rhs, double tolerance = 1e-13);

/// CSV with header x,y,A1,A2,re_phi,im_phi,re_p_phi,im_p_phi, row-major by (x, y).
void write_snapshot_csv(std::ostream& out, const LatticeConfig& cfg, const LatticeState& s);

}  // namespace hjlab::cs
