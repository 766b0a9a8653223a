#pragma once

// Which-path information carried away by photons transmitted during the
// first drive step. The photon count k is Poisson distributed with a mean
// that depends on the Dicke index, so recording it acts as the POVM
// E(k) = diag sqrt(p(k; kbar_n)) on the state after that step.

#include <vector>

#include "entamp/noise.hpp"

namespace entamp {

struct MirrorConfig {
  double q1 = 1.0;  // input mirror amplitude transmission
  double q2 = 1.0;  // output mirror amplitude transmission

  bool symmetric() const { return q1 == q2; }
  void validate() const;

  // Transmitted photons relative to a symmetric cavity at equal intra-cavity
  // power: 2 q2^2 / (q1^2 + q2^2), with q2 the smaller (output) mirror.
  double transmission_factor() const;

  // Power transmissions in ppm. All loss is booked on the smaller one, which
  // becomes the output mirror.
  static MirrorConfig from_ppm(double ppm_a, double ppm_b);
};

// kbar_n = factor * kbar1 * |T(omega_s, n)|^2 / |T(omega_s, 1)|^2, n = 0..N.
RVector kbar_profile(const CavityConfig& cfg, const MirrorConfig& mirrors, double kbar1);

// Smallest k with the Poisson tail beyond it below 1e-6 for the largest mean.
int default_kmax(const RVector& kbar);

struct LeakageBranch {
  int k = 0;
  DickeState state;
  double weight = 0.0;  // <branch|branch>
};

// Branches E(k)|psi> for k = 0..kmax whose weight is at least `prune`.
// Throws PropagationError if the truncated tail mass exceeds 1e-6 for any
// populated index.
std::vector<LeakageBranch> apply_leakage(const DickeState& state, const RVector& kbar, int kmax,
                                         double prune = 0.0);

struct LeakageOptions {
  bool simultaneous = true;   // shot noise and leakage drawn in one simulation
  bool step4_leakage = false; // also apply the POVM after the last drive step
  int trials = 200;
  std::uint64_t seed = 1;
  double epsilon_rms = 0.01;
  double prune = 1e-8;
  Execution exec = Execution::parallel;
};

struct LeakageResult {
  double kbar1 = 0.0;  // symmetric-cavity transmitted photons from n = 1
  RVector kbar;        // transmitted photon means per n for these mirrors
  double fidelity_noiseless = 0.0;
  double fidelity_leak = 0.0;
  double fidelity_shot = 0.0;
  double fidelity_overall = 0.0;
  double fidelity_multiplicative = 0.0;  // leak * shot / noiseless
  double std_error_overall = 0.0;
  double completeness_error = 0.0;  // |sum of branch weights - input weight|
  int branches = 0;
};

// Fidelity of the leakage channel alone: every branch runs through the steps
// after the first drive step and the corners are summed.
double leakage_fidelity(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                        const RVector& kbar, const LeakageOptions& opts,
                        double* completeness_error = nullptr, int* branches = nullptr);

// One row per grid value. The mean photon number of the first drive step is
// kbar1, later drive steps scale with their delta.
std::vector<LeakageResult> leakage_tradeoff(const CavityConfig& cfg,
                                            const ProtocolSchedule& schedule,
                                            const MirrorConfig& mirrors,
                                            const std::vector<double>& kbar1_grid,
                                            const LeakageOptions& opts = {});

}  // namespace entamp
