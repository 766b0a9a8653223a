#include "entamp/noise.hpp"

#include <cmath>
#include <sstream>

namespace entamp {

void NoiseConfig::validate() const {
  auto bad = [](double x) { return !std::isfinite(x) || x < 0.0; };
  if (bad(sigma_t)) throw ConfigError("noise.sigma_t_us must be finite and >= 0");
  if (bad(sigma_amp)) throw ConfigError("noise.sigma_amp must be finite and >= 0");
  if (bad(epsilon_rms)) throw ConfigError("noise.epsilon_rms must be finite and >= 0");
  if (bad(jitter_kappa)) throw ConfigError("noise.jitter_kappa must be finite and >= 0");
  if (!std::isfinite(photon_scale) || !(photon_scale > 0.0)) {
    throw ConfigError("noise.photon_scale must be positive");
  }
  if (trials < 1) throw ConfigError("noise.trials must be at least 1");
}

NoiseConfig NoiseConfig::none() {
  NoiseConfig n;
  n.sigma_t = 0.0;
  n.sigma_amp = 0.0;
  n.shot_noise = false;
  n.epsilon_rms = 0.0;
  n.jitter_kappa = 0.0;
  return n;
}

NoiseConfig NoiseConfig::timing_amplitude() {
  NoiseConfig n = none();
  n.sigma_t = 1e-3;
  n.sigma_amp = 0.002;
  return n;
}

NoiseConfig NoiseConfig::shot_inhomogeneous() {
  NoiseConfig n = none();
  n.shot_noise = true;
  n.epsilon_rms = 0.01;
  return n;
}

NoiseConfig NoiseConfig::jitter() {
  NoiseConfig n = none();
  n.jitter_kappa = 0.2;
  return n;
}

NoiseConfig NoiseConfig::combined() {
  NoiseConfig n;
  n.shot_noise = true;
  return n;
}

NoiseDraw draw_noise(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                     const NoiseConfig& noise, std::mt19937_64& rng) {
  NoiseDraw draw{schedule, 0.0};
  for (auto& step : draw.schedule.steps) {
    if (noise.sigma_t > 0.0) {
      std::normal_distribution<double> dt(0.0, noise.sigma_t);
      step.duration = std::max(0.0, step.duration + dt(rng));
    }
    if (noise.sigma_amp > 0.0) {
      std::normal_distribution<double> da(0.0, noise.sigma_amp);
      step.omega *= 1.0 + da(rng);
    }
  }
  if (noise.shot_noise) {
    const double omega_s = cfg.omega_s();
    for (auto& step : draw.schedule.steps) {
      if (!step.drive || *step.drive == 0.0) continue;
      const double nbar = noise.photon_scale * (*step.drive) / omega_s;
      if (!(nbar > 0.0) || !std::isfinite(nbar)) {
        std::ostringstream msg;
        msg << "shot noise: invalid mean photon number " << nbar;
        throw PropagationError(msg.str());
      }
      std::poisson_distribution<long long> photons(nbar);
      const double count = static_cast<double>(photons(rng));
      double eps = 0.0;
      if (noise.epsilon_rms > 0.0) {
        std::normal_distribution<double> de(0.0, noise.epsilon_rms);
        eps = std::abs(de(rng));
      }
      *step.drive = count * (1.0 - eps) * (*step.drive) / nbar;
    }
  }
  if (noise.jitter_kappa > 0.0) {
    std::normal_distribution<double> dxi(0.0, noise.jitter_kappa * cfg.kappa);
    draw.xi_offset = dxi(rng);
  }
  for (const auto& step : draw.schedule.steps) {
    if (!std::isfinite(step.duration) || !std::isfinite(step.omega) ||
        (step.drive && !std::isfinite(*step.drive))) {
      throw PropagationError("noise draw produced a non-finite parameter");
    }
  }
  if (!std::isfinite(draw.xi_offset)) throw PropagationError("noise draw: non-finite jitter");
  return draw;
}

TrialOutcome trial_outcome(const DickeState& final_state) {
  TrialOutcome t;
  t.corners = corner_elements(final_state);
  t.survival = final_state.norm_squared();
  const QfiPair q = quantum_fisher_information(final_state);
  t.qfi_normalized = q.normalized;
  t.qfi_weighted = q.weighted;
  return t;
}

McResult summarize_trials(std::span<const TrialOutcome> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("summarize_trials: no trials");
  const double count = static_cast<double>(outcomes.size());
  CompensatedSum pp, mm, pm_re, pm_im, surv, qn, qw;
  for (const auto& o : outcomes) {
    pp.add(o.corners.rho_pp);
    mm.add(o.corners.rho_mm);
    pm_re.add(o.corners.rho_pm.real());
    pm_im.add(o.corners.rho_pm.imag());
    surv.add(o.survival);
    qn.add(o.qfi_normalized);
    qw.add(o.qfi_weighted);
  }
  McResult r;
  r.trials = static_cast<int>(outcomes.size());
  r.corners = {pp.value() / count, mm.value() / count, cplx(pm_re.value(), pm_im.value()) / count};
  r.mean.rho_pp = r.corners.rho_pp;
  r.mean.rho_mm = r.corners.rho_mm;
  r.mean.rho_pm = r.corners.rho_pm;
  r.mean.fidelity = fidelity_from_corners(r.corners);
  r.mean.survival = surv.value() / count;
  r.mean.p_decay = std::max(0.0, 1.0 - r.mean.survival);
  r.mean.qfi_normalized = qn.value() / count;
  r.mean.qfi_weighted = qw.value() / count;
  // Pole-coherence contrast; equals the parity visibility for pole-supported states.
  r.mean.parity_visibility = r.mean.survival > 0.0 ? 2.0 * std::abs(r.corners.rho_pm) / r.mean.survival : 0.0;

  // Linearize F around the mean: f_i = (pp_i + mm_i)/2 + Re(pm_i e^{-i arg pm}).
  if (outcomes.size() > 1) {
    const double mag = std::abs(r.corners.rho_pm);
    const cplx unit = mag > 0.0 ? std::conj(r.corners.rho_pm) / mag : cplx(1.0);
    CompensatedSum dev2;
    for (const auto& o : outcomes) {
      const double f = 0.5 * (o.corners.rho_pp + o.corners.rho_mm) + (o.corners.rho_pm * unit).real();
      const double d = f - r.mean.fidelity;
      dev2.add(d * d);
    }
    r.std_error = std::sqrt(dev2.value() / (count - 1.0) / count);
  }
  return r;
}

McResult mc_fidelity(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                     const NoiseConfig& noise, Execution exec, const PropagationOptions& opts) {
  noise.validate();
  cfg.validate();
  schedule.validate();
  const auto outcomes = parallel_map(
      static_cast<std::size_t>(noise.trials),
      [&](std::size_t i) {
        auto rng = trial_rng(noise.seed, i);
        const NoiseDraw draw = draw_noise(cfg, schedule, noise, rng);
        PropagationOptions o = opts;
        o.xi_offset += draw.xi_offset;
        return trial_outcome(run_protocol(cfg, draw.schedule, o));
      },
      exec);
  return summarize_trials(outcomes);
}

McResult mc_combined(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                     const NoiseConfig& noise, Execution exec, const PropagationOptions& opts) {
  const NoiseConfig defaults = NoiseConfig::combined();
  NoiseConfig all = noise;
  all.shot_noise = true;
  if (all.sigma_t == 0.0) all.sigma_t = defaults.sigma_t;
  if (all.sigma_amp == 0.0) all.sigma_amp = defaults.sigma_amp;
  if (all.epsilon_rms == 0.0) all.epsilon_rms = defaults.epsilon_rms;
  if (all.jitter_kappa == 0.0) all.jitter_kappa = defaults.jitter_kappa;
  return mc_fidelity(cfg, schedule, all, exec, opts);
}

}  // namespace entamp
