#include "entamp/cavity.hpp"

#include <cmath>

namespace entamp {

void CavityConfig::validate() const {
  if (n_atoms < 1) throw ConfigError("system.N must be a positive integer");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("system.eta must be positive");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("system.kappa_mhz must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("system.gamma_mhz must be positive");
  if (delta == 0.0 || !std::isfinite(delta)) {
    throw ConfigError("system.delta_over_gamma must be finite and non-zero");
  }
}

CavityConfig CavityConfig::from_mhz(int n_atoms, double eta, double kappa_mhz, double gamma_mhz,
                                    double delta_over_gamma) {
  CavityConfig cfg;
  cfg.n_atoms = n_atoms;
  cfg.eta = eta;
  cfg.kappa = entamp::from_mhz(kappa_mhz);
  cfg.gamma = entamp::from_mhz(gamma_mhz);
  cfg.delta = delta_over_gamma * cfg.gamma;
  cfg.validate();
  return cfg;
}

cplx transmission(const CavityConfig& cfg, double xi, int n) {
  const double detuning = (cfg.delta + xi) / cfg.gamma;
  const double lorentz = 1.0 + 4.0 * detuning * detuning;
  const double loss = n * cfg.eta / lorentz;
  const double dispersion = xi / cfg.kappa - n * cfg.eta * detuning / lorentz;
  return 1.0 / cplx(1.0 + loss, -2.0 * dispersion);
}

BoundaryHamiltonian build_boundary(const CavityConfig& cfg, double delta,
                                   const BoundaryOptions& opts) {
  if (delta == 0.0 || !std::isfinite(delta)) {
    throw std::invalid_argument("build_boundary: drive strength must be finite and non-zero");
  }
  if (!opts.allow_gain && (delta > 0.0) != (cfg.delta > 0.0)) {
    throw std::invalid_argument(
        "build_boundary: sign(delta) differs from sign(Delta); the evolution would amplify the "
        "norm (set allow_gain to explore this regime)");
  }
  const int dim = cfg.n_atoms + 1;
  BoundaryHamiltonian h;
  h.delta = delta;
  h.ideal = opts.ideal;
  h.diag = CVector::Zero(dim);
  if (opts.ideal) {
    if (dim > 1) h.diag[1] = delta;
    return h;
  }
  const cplx prefactor = delta * cplx(1.0, -cfg.gamma / (2.0 * cfg.delta));
  const double omega_s = cfg.omega_s();
  const double t1 = std::norm(transmission(cfg, omega_s, 1));
  for (int n = 1; n < dim; ++n) {
    const double tn = std::norm(transmission(cfg, omega_s + opts.xi_offset, n));
    h.diag[n] = prefactor * (n * tn / t1);
  }
  if (opts.xi_offset == 0.0) h.diag[1] = prefactor;
  return h;
}

double mean_photons(double delta, const CavityConfig& cfg) { return delta / cfg.omega_s(); }

}  // namespace entamp
