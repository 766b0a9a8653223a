#pragma once

// Piecewise-constant propagation of the four-step GHZ creation protocol:
//
//   1. rotate |up>^N about x towards the boundary state (light off)
//   2. keep rotating with the cavity drive on: the boundary tears the CSS
//      into a cat state
//   3. realign the cat state about the axis at azimuth phi3 (light off)
//   4. drive again while rotating about phi4: the component at the south pole
//      is frozen, the other one is carried to the north pole
//
// Each step applies exp(-i [Omega S_phi + H'(delta)] t). Only the coherent
// part of the state is tracked, so its norm decays under dissipative drives.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "entamp/cavity.hpp"
#include "entamp/dicke.hpp"
#include "entamp/expm.hpp"

namespace entamp {

struct ProtocolStep {
  double omega = 0.0;     // Rabi rate
  double duration = 0.0;  // us
  double phase = 0.0;     // rotation-axis azimuth
  std::optional<double> drive;  // cavity-induced shift delta; empty = light off
  bool ideal_boundary = false;
};

// Parameters of the canonical four-step schedule, in rad/us and us.
struct ProtocolParams {
  double omega = 0.0;
  std::array<double, 4> t{};
  double phi3 = 0.0;
  double phi4 = 0.0;
  double delta2 = 0.0;
  double delta4 = 0.0;
  bool ideal_boundary = false;
};

struct ProtocolSchedule {
  std::vector<ProtocolStep> steps;

  static ProtocolSchedule canonical(const ProtocolParams& p);
  bool is_canonical() const;
  // Throws ConfigError for negative durations or Rabi rates and non-finite values.
  void validate() const;
};

// Human-readable notes for drive steps that violate sqrt(N) Omega < |delta|.
std::vector<std::string> schedule_warnings(const CavityConfig& cfg, const ProtocolSchedule& s);

struct PropagationOptions {
  double tol = 1e-10;
  bool allow_gain = false;  // forwarded to build_boundary; disables the divergence check
  double xi_offset = 0.0;   // cavity frequency offset held for the whole shot
};

// Generator Omega S_phi + H'(delta) of a single step.
TridiagonalGenerator step_generator(const CavityConfig& cfg, const ProtocolStep& step,
                                    const PropagationOptions& opts = {});

DickeState propagate_step(const CavityConfig& cfg, const ProtocolStep& step,
                          const DickeState& state, const PropagationOptions& opts = {});

// Applies the schedule to `initial` (or |up>^N). Throws PropagationError if
// the norm exceeds 1 + 1e-9 after any step.
DickeState run_protocol(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                        const PropagationOptions& opts = {});
DickeState run_protocol(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                        const DickeState& initial, const PropagationOptions& opts = {});

// Same evolution realized with rotations about x only, interleaved with
// z-rotations. Returns exp(i S_z phi_last) |psi>, where phi_last is the phase of
// the final step (phi4 for the canonical schedule).
DickeState run_protocol_xz(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                           const PropagationOptions& opts = {});

// exp(i S_z angle) |psi>
DickeState rotate_z(const DickeState& state, double angle);

// |amplitude|^2 before the first step and after each step.
std::vector<RVector> step_populations(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                                      const PropagationOptions& opts = {});

// 1 - <psi|psi>, clamped to [0, 1].
double decay_probability(const DickeState& final_state);

}  // namespace entamp
