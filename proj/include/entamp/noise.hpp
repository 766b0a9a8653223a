#pragma once

// Monte Carlo robustness of the protocol against control and cavity noise.
// Each trial perturbs the schedule, propagates the coherent part, and the
// corner elements of |psi_f><psi_f| are averaged over trials; the fidelity is
// then evaluated on the averaged mixed state.

#include <cstdint>
#include <random>
#include <span>

#include "entamp/metrics.hpp"
#include "entamp/parallel.hpp"
#include "entamp/protocol.hpp"

namespace entamp {

struct NoiseConfig {
  double sigma_t = 1e-3;      // timing std per step, us
  double sigma_amp = 0.002;   // relative Rabi-amplitude std per step
  bool shot_noise = false;    // Poisson photon number per drive step, plus coupling reduction
  double epsilon_rms = 0.01;  // std of the Gaussian whose modulus is the coupling reduction
  double jitter_kappa = 0.2;  // cavity-laser detuning std per shot, in units of kappa
  // Mean photon number of drive step i is photon_scale * delta_i / omega_s.
  double photon_scale = 1.0;
  int trials = 400;
  std::uint64_t seed = 1;

  void validate() const;

  static NoiseConfig none();
  static NoiseConfig timing_amplitude();   // control errors only
  static NoiseConfig shot_inhomogeneous(); // photon shot noise + coupling inhomogeneity
  static NoiseConfig jitter();             // cavity frequency jitter only
  static NoiseConfig combined();           // everything at default strength
};

struct NoiseDraw {
  ProtocolSchedule schedule;
  double xi_offset = 0.0;
};

// One shot's worth of perturbations. Draw order is fixed: per step timing then
// amplitude, then per drive step photon number then coupling reduction, then
// the jitter offset.
NoiseDraw draw_noise(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                     const NoiseConfig& noise, std::mt19937_64& rng);

struct TrialOutcome {
  CornerElements corners;
  double survival = 0.0;
  double qfi_normalized = 0.0;
  double qfi_weighted = 0.0;
};

TrialOutcome trial_outcome(const DickeState& final_state);

struct McResult {
  GhzReport mean;          // corners/fidelity of the averaged state; other fields trial means
  CornerElements corners;  // averaged corner elements
  double std_error = 0.0;  // of the fidelity, delta-method over trials
  int trials = 0;
};

// Reduces per-trial outcomes in index order with compensated sums.
McResult summarize_trials(std::span<const TrialOutcome> outcomes);

McResult mc_fidelity(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                     const NoiseConfig& noise, Execution exec = Execution::parallel,
                     const PropagationOptions& opts = {});

// All channels on. Zero strengths in `noise` are replaced by the defaults.
McResult mc_combined(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                     const NoiseConfig& noise, Execution exec = Execution::parallel,
                     const PropagationOptions& opts = {});

}  // namespace entamp
