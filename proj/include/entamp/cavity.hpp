#pragma once

// Dispersive atom-cavity model: transmission amplitude, per-atom resonance
// shift and the (possibly non-Hermitian) boundary Hamiltonian. hbar = 1 and
// every rate is in rad/us.

#include "entamp/types.hpp"

namespace entamp {

struct CavityConfig {
  int n_atoms = 0;
  double kappa = 0.0;  // cavity linewidth
  double gamma = 0.0;  // excited-state decay rate
  double delta = 0.0;  // atom-cavity detuning, sign-carrying
  double eta = 0.0;    // cooperativity

  // omega_s = g^2 / Delta with g^2 = eta kappa Gamma / 4.
  double omega_s() const { return eta * kappa * gamma / (4.0 * delta); }
  double g_squared() const { return eta * kappa * gamma / 4.0; }

  // Throws ConfigError on N < 1, non-positive eta/kappa/Gamma or Delta = 0.
  void validate() const;

  static CavityConfig from_mhz(int n_atoms, double eta, double kappa_mhz, double gamma_mhz,
                               double delta_over_gamma);
};

// Amplitude transmission T(xi, n) for light detuned by xi from the bare
// cavity with n atoms in |up>.
cplx transmission(const CavityConfig& cfg, double xi, int n);

struct BoundaryHamiltonian {
  CVector diag;  // indexed by n, ascending
  double delta = 0.0;
  bool ideal = false;
};

struct BoundaryOptions {
  bool ideal = false;
  // Permit sign(delta) != sign(Delta), which makes the evolution norm-growing.
  bool allow_gain = false;
  // Extra light-cavity detuning (cavity frequency jitter). The normalization
  // |T(omega_s, 1)|^2 stays at the nominal operating point.
  double xi_offset = 0.0;
};

// diag_n = delta (1 - i Gamma/(2 Delta)) n |T(omega_s + xi_offset, n)|^2 / |T(omega_s, 1)|^2,
// or delta at n = 1 only for the ideal boundary.
BoundaryHamiltonian build_boundary(const CavityConfig& cfg, double delta,
                                   const BoundaryOptions& opts = {});

// Intra-cavity photon number implied by a drive strength: delta / omega_s.
double mean_photons(double delta, const CavityConfig& cfg);

}  // namespace entamp
