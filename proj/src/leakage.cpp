#include "entamp/leakage.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace entamp {

void MirrorConfig::validate() const {
  if (!(q1 > 0.0) || !(q2 > 0.0) || !std::isfinite(q1) || !std::isfinite(q2)) {
    throw ConfigError("leakage.mirror_ppm: mirror transmissions must be positive");
  }
}

double MirrorConfig::transmission_factor() const {
  validate();
  const double small = std::min(q1, q2);
  return 2.0 * small * small / (q1 * q1 + q2 * q2);
}

MirrorConfig MirrorConfig::from_ppm(double ppm_a, double ppm_b) {
  MirrorConfig m{std::sqrt(std::max(ppm_a, ppm_b)), std::sqrt(std::min(ppm_a, ppm_b))};
  m.validate();
  return m;
}

RVector kbar_profile(const CavityConfig& cfg, const MirrorConfig& mirrors, double kbar1) {
  if (!(kbar1 >= 0.0)) throw std::invalid_argument("kbar_profile: kbar1 must be >= 0");
  const double ws = cfg.omega_s();
  const double ref = std::norm(transmission(cfg, ws, 1));
  const double scale = mirrors.transmission_factor() * kbar1 / ref;
  RVector kbar(cfg.n_atoms + 1);
  for (int n = 0; n <= cfg.n_atoms; ++n) kbar[n] = scale * std::norm(transmission(cfg, ws, n));
  return kbar;
}

namespace {

double log_poisson(int k, double mean) {
  if (mean == 0.0) return k == 0 ? 0.0 : -INFINITY;
  return k * std::log(mean) - mean - std::lgamma(k + 1.0);
}

// P(K > kmax) for K ~ Poisson(mean), summed directly above kmax.
double poisson_tail(int kmax, double mean) {
  if (mean == 0.0) return 0.0;
  double tail = 0.0;
  const int stop = kmax + 50 + static_cast<int>(20.0 * std::sqrt(mean) + mean);
  for (int k = kmax + 1; k <= stop; ++k) tail += std::exp(log_poisson(k, mean));
  return tail;
}

}  // namespace

int default_kmax(const RVector& kbar) {
  const double top = kbar.size() ? kbar.maxCoeff() : 0.0;
  int kmax = static_cast<int>(std::ceil(top + 10.0 * std::sqrt(top)));
  while (poisson_tail(kmax, top) > 1e-6) kmax += 1 + kmax / 10;
  return kmax;
}

std::vector<LeakageBranch> apply_leakage(const DickeState& state, const RVector& kbar, int kmax,
                                         double prune) {
  if (kbar.size() != state.dim()) throw std::invalid_argument("apply_leakage: kbar length != N+1");
  if (kmax < 0) throw std::invalid_argument("apply_leakage: kmax must be >= 0");
  const RVector pop = state.populations();
  for (int n = 0; n < state.dim(); ++n) {
    if (pop[n] == 0.0) continue;
    const double tail = poisson_tail(kmax, kbar[n]);
    if (tail > 1e-6) {
      std::ostringstream msg;
      msg << "leakage truncation: tail mass " << tail << " at n = " << n << " exceeds 1e-6 (kmax "
          << kmax << ")";
      throw PropagationError(msg.str());
    }
  }
  std::vector<LeakageBranch> out;
  for (int k = 0; k <= kmax; ++k) {
    CVector a = state.amplitudes();
    for (int n = 0; n < state.dim(); ++n) a[n] *= std::exp(0.5 * log_poisson(k, kbar[n]));
    const double w = a.squaredNorm();
    if (w < prune || w == 0.0) continue;
    out.push_back({k, DickeState(state.n_atoms(), std::move(a)), w});
  }
  return out;
}

namespace {

struct Split {
  ProtocolSchedule head;  // up to and including the first drive step
  ProtocolSchedule tail;
};

Split split_after_first_drive(const ProtocolSchedule& s) {
  const auto it = std::find_if(s.steps.begin(), s.steps.end(),
                               [](const ProtocolStep& st) { return st.drive.has_value(); });
  if (it == s.steps.end()) throw ConfigError("protocol: leakage needs a drive step");
  Split sp;
  sp.head.steps.assign(s.steps.begin(), it + 1);
  sp.tail.steps.assign(it + 1, s.steps.end());
  return sp;
}

double first_drive(const ProtocolSchedule& s) {
  for (const auto& st : s.steps) {
    if (st.drive) return *st.drive;
  }
  return 0.0;
}

// Corners after optionally measuring the photons of the last drive step,
// whose POVM only dephases the pole coherence.
CornerElements final_corners(const DickeState& psi, const RVector* kbar_last) {
  CornerElements c = corner_elements(psi);
  if (kbar_last) {
    const double a = (*kbar_last)[psi.n_atoms()];
    const double b = (*kbar_last)[0];
    // sum_k sqrt(p(k;a) p(k;b)) = exp(-(sqrt a - sqrt b)^2 / 2)
    const double overlap = std::exp(-0.5 * std::pow(std::sqrt(a) - std::sqrt(b), 2));
    c.rho_pm *= overlap;
  }
  return c;
}

CornerElements leak_corners(const CavityConfig& cfg, const DickeState& after_head,
                            const ProtocolSchedule& tail, const RVector& kbar,
                            const RVector* kbar_last, const LeakageOptions& opts, Execution exec,
                            double* completeness, int* count) {
  const auto branches = apply_leakage(after_head, kbar, default_kmax(kbar), opts.prune);
  if (completeness) {
    CompensatedSum w;
    for (const auto& b : branches) w.add(b.weight);
    *completeness = std::abs(w.value() - after_head.norm_squared());
  }
  if (count) *count = static_cast<int>(branches.size());
  const auto corners = parallel_map(
      branches.size(),
      [&](std::size_t i) {
        return final_corners(run_protocol(cfg, tail, branches[i].state), kbar_last);
      },
      exec);
  CompensatedSum pp, mm, re, im;
  for (const auto& c : corners) {
    pp.add(c.rho_pp);
    mm.add(c.rho_mm);
    re.add(c.rho_pm.real());
    im.add(c.rho_pm.imag());
  }
  return {pp.value(), mm.value(), cplx(re.value(), im.value())};
}

RVector scaled_profile(const RVector& kbar, double ratio) { return kbar * std::abs(ratio); }

double last_drive_ratio(const ProtocolSchedule& s) {
  double first = 0.0, last = 0.0;
  bool seen = false;
  for (const auto& st : s.steps) {
    if (!st.drive) continue;
    if (!seen) first = *st.drive;
    seen = true;
    last = *st.drive;
  }
  return first != 0.0 ? last / first : 0.0;
}

}  // namespace

double leakage_fidelity(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                        const RVector& kbar, const LeakageOptions& opts,
                        double* completeness_error, int* branches) {
  const Split sp = split_after_first_drive(schedule);
  const DickeState mid = run_protocol(cfg, sp.head);
  RVector last;
  if (opts.step4_leakage) last = scaled_profile(kbar, last_drive_ratio(schedule));
  const CornerElements c = leak_corners(cfg, mid, sp.tail, kbar, opts.step4_leakage ? &last : nullptr,
                                        opts, opts.exec, completeness_error, branches);
  return fidelity_from_corners(c);
}

std::vector<LeakageResult> leakage_tradeoff(const CavityConfig& cfg,
                                            const ProtocolSchedule& schedule,
                                            const MirrorConfig& mirrors,
                                            const std::vector<double>& kbar1_grid,
                                            const LeakageOptions& opts) {
  if (kbar1_grid.empty()) throw ConfigError("leakage.kbar1_grid: grid is empty");
  if (opts.trials < 1) throw ConfigError("leakage.trials must be at least 1");
  cfg.validate();
  schedule.validate();
  mirrors.validate();
  const double noiseless = ghz_fidelity(run_protocol(cfg, schedule)).fidelity;
  const double delta_first = first_drive(schedule);
  const double ratio = last_drive_ratio(schedule);

  std::vector<LeakageResult> out;
  for (const double kbar1 : kbar1_grid) {
    if (!(kbar1 > 0.0)) throw ConfigError("leakage.kbar1_grid: values must be positive");
    LeakageResult r;
    r.kbar1 = kbar1;
    r.kbar = kbar_profile(cfg, mirrors, kbar1);
    r.fidelity_noiseless = noiseless;
    r.fidelity_leak =
        leakage_fidelity(cfg, schedule, r.kbar, opts, &r.completeness_error, &r.branches);

    // Intra-cavity photons of the first drive step equal kbar1 (symmetric baseline).
    NoiseConfig shot = NoiseConfig::shot_inhomogeneous();
    shot.epsilon_rms = opts.epsilon_rms;
    shot.trials = opts.trials;
    shot.seed = opts.seed;
    shot.photon_scale = kbar1 / mean_photons(delta_first, cfg);
    r.fidelity_shot = mc_fidelity(cfg, schedule, shot, opts.exec).mean.fidelity;
    r.fidelity_multiplicative = noiseless > 0.0 ? r.fidelity_leak * r.fidelity_shot / noiseless : 0.0;

    if (opts.simultaneous) {
      RVector last;
      if (opts.step4_leakage) last = scaled_profile(r.kbar, ratio);
      const auto trials = parallel_map(
          static_cast<std::size_t>(opts.trials),
          [&](std::size_t i) {
            auto rng = trial_rng(opts.seed, i);
            const NoiseDraw draw = draw_noise(cfg, schedule, shot, rng);
            const Split dsp = split_after_first_drive(draw.schedule);
            const DickeState mid = run_protocol(cfg, dsp.head);
            TrialOutcome t;
            t.corners = leak_corners(cfg, mid, dsp.tail, r.kbar, opts.step4_leakage ? &last : nullptr,
                                     opts, Execution::serial, nullptr, nullptr);
            return t;
          },
          opts.exec);
      const McResult mc = summarize_trials(trials);
      r.fidelity_overall = mc.mean.fidelity;
      r.std_error_overall = mc.std_error;
    } else {
      r.fidelity_overall = r.fidelity_multiplicative;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace entamp
