#pragma once

// GHZ figures of merit evaluated on the coherent part of the final state.

#include <span>
#include <vector>

#include "entamp/dicke.hpp"

namespace entamp {

// Density-matrix corners between the poles n = N (|up>^N) and n = 0.
struct CornerElements {
  double rho_pp = 0.0;
  double rho_mm = 0.0;
  cplx rho_pm = 0.0;  // coefficient of |N/2><-N/2|

  CornerElements& operator+=(const CornerElements& o);
  CornerElements scaled(double s) const;
};

CornerElements corner_elements(const DickeState& state);

// max over phi of <GHZ,phi|rho|GHZ,phi> = (rho_pp + rho_mm)/2 + |rho_pm|.
double fidelity_from_corners(const CornerElements& c);

struct GhzReport {
  double rho_pp = 0.0;
  double rho_mm = 0.0;
  cplx rho_pm = 0.0;
  double fidelity = 0.0;
  double survival = 0.0;
  double p_decay = 0.0;
  double qfi_normalized = 0.0;
  double qfi_weighted = 0.0;
  double parity_visibility = 0.0;
};

// Fidelity fields (corners, fidelity, survival, p_decay) only.
GhzReport ghz_fidelity(const DickeState& state);

// <P> after exp(+i pi S_theta / 2), S_theta = S_x cos(theta) + S_y sin(theta),
// with P = prod sigma_z = (-1)^(N-n). The state is normalized first.
std::vector<double> parity_scan(const DickeState& state, std::span<const double> thetas);

// (max - min)/2 of <P> sampled across one period 2 pi / N.
double parity_visibility(const DickeState& state, int samples = 64);

struct QfiPair {
  double normalized = 0.0;  // 4 Var(S_z) / N on the normalized state
  double weighted = 0.0;    // survival * normalized
};

QfiPair quantum_fisher_information(const DickeState& state);

// Every GhzReport field.
GhzReport make_report(const DickeState& state);

}  // namespace entamp
