#pragma once

// Symmetric-subspace (Dicke basis) representation of an N-atom ensemble.
//
// Basis index n counts atoms in |up>, so n = 0 is the south pole
// |m = -N/2> and n = N is |up>^N. Everything that the physics literature
// lists "from n = N down to 0" is reversed once, at construction.

#include <span>
#include <string>
#include <vector>

#include "entamp/parallel.hpp"
#include "entamp/types.hpp"

namespace entamp {

class DickeState {
 public:
  DickeState(int n_atoms, CVector amplitudes);

  int n_atoms() const { return n_atoms_; }
  int dim() const { return n_atoms_ + 1; }
  const CVector& amplitudes() const { return amps_; }
  cplx operator[](int n) const { return amps_[n]; }

  double norm_squared() const { return amps_.squaredNorm(); }
  RVector populations() const { return amps_.cwiseAbs2(); }
  DickeState normalized() const;

 private:
  int n_atoms_;
  CVector amps_;
};

// Dense collective operators on the (N+1)-dimensional symmetric irrep.
// Meant for small N (tests, oracles, diagnostics); propagation uses the
// tridiagonal generator in expm.hpp instead.
struct CollectiveOps {
  int n_atoms = 0;
  CMatrix sx, sy, sz, s_plus, s_minus;

  static CollectiveOps build(int n_atoms);
  // S_x cos(phi) + S_y sin(phi)
  CMatrix s_phi(double phi) const;
};

// <n+1|S_+|n> = sqrt(S(S+1) - m(m+1)) = sqrt((n+1)(N-n)).
double raising_coefficient(int n_atoms, int n);

// log C(N, n), stable up to N of several thousand.
double log_binomial(int n_atoms, int n);

DickeState make_css_up(int n_atoms);

// Spin coherent state at colatitude theta (theta = 0 is |up>^N) and azimuth phi.
DickeState spin_coherent(int n_atoms, double theta, double phi);

struct SphericalPoint {
  double theta;
  double phi;
};

// Q(theta, phi) = (N+1)/(4 pi) |<theta, phi|psi>|^2 with psi normalized first.
std::vector<double> husimi_q(const DickeState& state, std::span<const SphericalPoint> grid);

struct HusimiMap {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> theta;   // cell-centred colatitudes
  std::vector<double> phi;     // cell-centred azimuths
  std::vector<double> values;  // row-major, theta-major

  double at(int i_theta, int i_phi) const { return values[i_theta * n_phi + i_phi]; }
  // Midpoint-rule integral of Q sin(theta) dtheta dphi.
  double integral() const;
};

// Regular midpoint grid over the sphere. Rows are evaluated in parallel.
HusimiMap husimi_map(const DickeState& state, int n_theta = 256, int n_phi = 512,
                     Execution exec = Execution::parallel);

void write_husimi_csv(const HusimiMap& map, const std::string& path);
// Text header "nθ nφ\n" followed by nθ*nφ little-endian float64 values, row-major.
void write_husimi_binary(const HusimiMap& map, const std::string& path);
HusimiMap read_husimi_binary(const std::string& path);

}  // namespace entamp
