#include "entamp/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace entamp {

ProtocolSchedule ProtocolSchedule::canonical(const ProtocolParams& p) {
  ProtocolSchedule s;
  s.steps = {
      {p.omega, p.t[0], 0.0, std::nullopt, p.ideal_boundary},
      {p.omega, p.t[1], 0.0, p.delta2, p.ideal_boundary},
      {p.omega, p.t[2], p.phi3, std::nullopt, p.ideal_boundary},
      {p.omega, p.t[3], p.phi4, p.delta4, p.ideal_boundary},
  };
  return s;
}

bool ProtocolSchedule::is_canonical() const {
  return steps.size() == 4 && !steps[0].drive && steps[1].drive && !steps[2].drive &&
         steps[3].drive && steps[0].phase == 0.0 && steps[1].phase == 0.0;
}

void ProtocolSchedule::validate() const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& st = steps[i];
    const std::string where = "step " + std::to_string(i + 1);
    if (!std::isfinite(st.omega) || !std::isfinite(st.duration) || !std::isfinite(st.phase) ||
        (st.drive && !std::isfinite(*st.drive))) {
      throw ConfigError(where + ": non-finite parameter");
    }
    if (st.duration < 0.0) throw ConfigError(where + ": negative duration");
    if (st.omega < 0.0) throw ConfigError(where + ": negative Rabi rate");
  }
}

std::vector<std::string> schedule_warnings(const CavityConfig& cfg, const ProtocolSchedule& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    const auto& st = s.steps[i];
    if (!st.drive) continue;
    const double lhs = std::sqrt(static_cast<double>(cfg.n_atoms)) * st.omega;
    if (!(lhs < std::abs(*st.drive))) {
      std::ostringstream msg;
      msg << "step " << i + 1 << ": sqrt(N)*Omega = " << lhs << " is not below |delta| = "
          << std::abs(*st.drive) << " (off-resonance condition)";
      out.push_back(msg.str());
    }
  }
  return out;
}

TridiagonalGenerator step_generator(const CavityConfig& cfg, const ProtocolStep& step,
                                    const PropagationOptions& opts) {
  auto gen = TridiagonalGenerator::rotation(cfg.n_atoms, step.omega, step.phase);
  if (step.drive && *step.drive != 0.0) {
    BoundaryOptions bo;
    bo.ideal = step.ideal_boundary;
    bo.allow_gain = opts.allow_gain;
    bo.xi_offset = opts.xi_offset;
    gen.add_diagonal(build_boundary(cfg, *step.drive, bo).diag);
  }
  return gen;
}

DickeState propagate_step(const CavityConfig& cfg, const ProtocolStep& step,
                          const DickeState& state, const PropagationOptions& opts) {
  if (step.duration == 0.0) return state;
  return expm_apply(step_generator(cfg, step, opts), step.duration, state, opts.tol);
}

namespace {

void check_norm(const DickeState& s, std::size_t step, const PropagationOptions& opts) {
  if (opts.allow_gain) return;
  const double nrm = s.norm_squared();
  if (!(nrm <= 1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "propagation diverged after step " << step + 1 << ": squared norm " << nrm;
    throw PropagationError(msg.str());
  }
}

}  // namespace

DickeState run_protocol(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                        const DickeState& initial, const PropagationOptions& opts) {
  if (initial.n_atoms() != cfg.n_atoms) {
    throw std::invalid_argument("run_protocol: state and cavity disagree on N");
  }
  schedule.validate();
  DickeState psi = initial;
  for (std::size_t i = 0; i < schedule.steps.size(); ++i) {
    psi = propagate_step(cfg, schedule.steps[i], psi, opts);
    check_norm(psi, i, opts);
  }
  return psi;
}

DickeState run_protocol(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                        const PropagationOptions& opts) {
  return run_protocol(cfg, schedule, make_css_up(cfg.n_atoms), opts);
}

DickeState rotate_z(const DickeState& state, double angle) {
  CVector a = state.amplitudes();
  const double half = 0.5 * state.n_atoms();
  for (int n = 0; n < state.dim(); ++n) a[n] *= std::polar(1.0, (n - half) * angle);
  return DickeState(state.n_atoms(), std::move(a));
}

DickeState run_protocol_xz(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                           const PropagationOptions& opts) {
  schedule.validate();
  // exp(-i Omega S_phi t) = exp(-i S_z phi) exp(-i Omega S_x t) exp(i S_z phi); the
  // boundary term is diagonal and commutes with S_z, so only the frame
  // phase carried between steps changes.
  DickeState psi = make_css_up(cfg.n_atoms);
  double frame = 0.0;
  for (std::size_t i = 0; i < schedule.steps.size(); ++i) {
    ProtocolStep step = schedule.steps[i];
    if (step.phase != frame) psi = rotate_z(psi, step.phase - frame);
    frame = step.phase;
    step.phase = 0.0;
    psi = propagate_step(cfg, step, psi, opts);
    check_norm(psi, i, opts);
  }
  return psi;
}

std::vector<RVector> step_populations(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                                      const PropagationOptions& opts) {
  schedule.validate();
  std::vector<RVector> out;
  DickeState psi = make_css_up(cfg.n_atoms);
  out.push_back(psi.populations());
  for (std::size_t i = 0; i < schedule.steps.size(); ++i) {
    psi = propagate_step(cfg, schedule.steps[i], psi, opts);
    check_norm(psi, i, opts);
    out.push_back(psi.populations());
  }
  return out;
}

double decay_probability(const DickeState& final_state) {
  return std::clamp(1.0 - final_state.norm_squared(), 0.0, 1.0);
}

}  // namespace entamp
