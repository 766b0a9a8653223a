#include "entamp/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "entamp/expm.hpp"

namespace entamp {

CornerElements& CornerElements::operator+=(const CornerElements& o) {
  rho_pp += o.rho_pp;
  rho_mm += o.rho_mm;
  rho_pm += o.rho_pm;
  return *this;
}

CornerElements CornerElements::scaled(double s) const { return {rho_pp * s, rho_mm * s, rho_pm * s}; }

CornerElements corner_elements(const DickeState& state) {
  const cplx up = state[state.n_atoms()];
  const cplx down = state[0];
  return {std::norm(up), std::norm(down), up * std::conj(down)};
}

double fidelity_from_corners(const CornerElements& c) {
  return 0.5 * (c.rho_pp + c.rho_mm) + std::abs(c.rho_pm);
}

GhzReport ghz_fidelity(const DickeState& state) {
  const CornerElements c = corner_elements(state);
  GhzReport r;
  r.rho_pp = c.rho_pp;
  r.rho_mm = c.rho_mm;
  r.rho_pm = c.rho_pm;
  r.fidelity = fidelity_from_corners(c);
  r.survival = state.norm_squared();
  r.p_decay = std::clamp(1.0 - r.survival, 0.0, 1.0);
  return r;
}

namespace {

double parity_expectation(const DickeState& psi) {
  const RVector pop = psi.populations();
  const int n_atoms = psi.n_atoms();
  double sum = 0.0;
  for (int n = 0; n <= n_atoms; ++n) sum += ((n_atoms - n) % 2 == 0) ? pop[n] : -pop[n];
  return sum;
}

double parity_at(const DickeState& normalized, double theta) {
  // exp(+i pi S_theta / 2) = exp(-i H) with H = -(pi/2) S_theta
  const auto gen =
      TridiagonalGenerator::rotation(normalized.n_atoms(), -0.5 * std::numbers::pi, theta);
  return parity_expectation(expm_apply(gen, 1.0, normalized, 1e-12));
}

// Golden-section refinement of an extremum of <P> bracketed by [lo, hi].
double refine_extremum(const DickeState& psi, double lo, double hi, bool maximize) {
  constexpr double kInvPhi = 0.6180339887498949;
  const double sign = maximize ? -1.0 : 1.0;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = sign * parity_at(psi, x1), f2 = sign * parity_at(psi, x2);
  for (int it = 0; it < 40 && (b - a) > 1e-13; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = sign * parity_at(psi, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = sign * parity_at(psi, x2);
    }
  }
  return sign * std::min(f1, f2);
}

}  // namespace

std::vector<double> parity_scan(const DickeState& state, std::span<const double> thetas) {
  std::vector<double> out(thetas.size());
  if (thetas.empty()) return out;
  const DickeState psi = state.normalized();
  for (std::size_t i = 0; i < thetas.size(); ++i) out[i] = parity_at(psi, thetas[i]);
  return out;
}

double parity_visibility(const DickeState& state, int samples) {
  if (samples < 4) throw std::invalid_argument("parity_visibility: need at least 4 samples");
  const DickeState psi = state.normalized();
  const double period = kTwoPi / psi.n_atoms();
  const double h = period / samples;
  std::vector<double> values(samples);
  for (int i = 0; i < samples; ++i) values[i] = parity_at(psi, i * h);
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double t_min = (lo_it - values.begin()) * h;
  const double t_max = (hi_it - values.begin()) * h;
  const double vmax = std::max(*hi_it, refine_extremum(psi, t_max - h, t_max + h, true));
  const double vmin = std::min(*lo_it, refine_extremum(psi, t_min - h, t_min + h, false));
  return 0.5 * (vmax - vmin);
}

QfiPair quantum_fisher_information(const DickeState& state) {
  const double survival = state.norm_squared();
  if (survival == 0.0) return {};
  const RVector pop = state.populations() / survival;
  const double half = 0.5 * state.n_atoms();
  double mean = 0.0, second = 0.0;
  for (int n = 0; n < state.dim(); ++n) {
    const double m = n - half;
    mean += pop[n] * m;
    second += pop[n] * m * m;
  }
  const double fq = 4.0 * std::max(0.0, second - mean * mean);
  QfiPair q;
  q.normalized = fq / state.n_atoms();
  q.weighted = survival * q.normalized;
  return q;
}

GhzReport make_report(const DickeState& state) {
  GhzReport r = ghz_fidelity(state);
  const QfiPair q = quantum_fisher_information(state);
  r.qfi_normalized = q.normalized;
  r.qfi_weighted = q.weighted;
  r.parity_visibility = r.survival > 0.0 ? parity_visibility(state) : 0.0;
  return r;
}

}  // namespace entamp
