#pragma once

// Batch runs over parameter tables, the scaling/empirical fits built on them,
// and a bounded Nelder-Mead polish of a schedule.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entamp/metrics.hpp"
#include "entamp/parallel.hpp"
#include "entamp/protocol.hpp"

namespace entamp {

// One table row in the units of the config files (MHz/2pi, us).
struct ParameterSet {
  int n_atoms = 0;
  double eta = 0.0;
  double kappa_mhz = 0.1;
  double gamma_mhz = 6.0;
  double delta_over_gamma = 0.0;
  double omega_mhz = 0.0;
  std::array<double, 4> t_us{};
  double phi3 = 0.0;
  double phi4 = 0.0;
  double delta2_mhz = 0.0;
  double delta4_mhz = 0.0;
  bool ideal_boundary = false;
  std::optional<double> reference_fidelity;

  CavityConfig cavity() const;
  ProtocolParams protocol() const;
  ProtocolSchedule schedule() const { return ProtocolSchedule::canonical(protocol()); }
};

struct SweepPoint {
  ParameterSet params;
  std::optional<GhzReport> report;  // empty when the row failed
  std::string error;

  bool ok() const { return report.has_value(); }
};

struct SweepOptions {
  bool parity = false;  // parity visibility is the costly field; off by default
  PropagationOptions propagation;
  Execution exec = Execution::parallel;
};

// Rows run independently; a failing row carries its message instead of a report.
std::vector<SweepPoint> run_table(std::span<const ParameterSet> rows, const SweepOptions& opts = {});

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

// Ordinary least squares y = a + b x. Throws std::invalid_argument on fewer
// than two points or constant x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Fit of log y against log x; slope is the exponent.
LinearFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct ScalingReport {
  LinearFit delta2_over_omega;
  LinearFit delta4_over_omega;
  LinearFit omega_t2;
  LinearFit omega_t3;
  LinearFit pi_minus_omega_t1;
  LinearFit pi_minus_omega_t4;
  LinearFit p_decay_vs_ln_n;  // linear in ln N
};

// Needs at least 5 successful points with max N / min N >= 10.
ScalingReport fit_scalings(std::span<const SweepPoint> points);

// The five families behind the empirical fit: every row of `by_n` (fixed
// eta), plus, for each N in `fixed_n`, that row re-run at every (eta, Delta)
// pair of `by_eta`.
std::vector<ParameterSet> empirical_grid(std::span<const ParameterSet> by_n,
                                         std::span<const ParameterSet> by_eta,
                                         std::span<const int> fixed_n);

// F against (ln N) / eta over the successful points.
LinearFit fit_empirical(std::span<const SweepPoint> points);

struct OptimizeOptions {
  int max_evaluations = 400;
  double time_box = 0.1;   // relative half-width for t1..t4
  double phase_box = 0.2;  // absolute half-width for phi3, phi4 (rad)
  double drive_box = 0.2;  // relative half-width for delta2, delta4
  double initial_step = 0.25;  // initial simplex edge, fraction of the half-width
  double tolerance = 1e-7;     // spread of simplex values that stops the search
  std::uint64_t seed = 1;      // orients the initial simplex
  PropagationOptions propagation;
};

struct OptimizeResult {
  ProtocolParams params;
  double fidelity = 0.0;
  double initial_fidelity = 0.0;
  int evaluations = 0;
};

// Local search over (t1..t4, phi3, phi4, delta2, delta4) inside the box around
// `start`. Failed evaluations count as -inf. Never returns a point worse than
// `start`.
OptimizeResult optimize_schedule(const CavityConfig& cfg, const ProtocolParams& start,
                                 const OptimizeOptions& opts = {});

// Independent searches, one per seed, run in parallel; the best is returned.
OptimizeResult optimize_multistart(const CavityConfig& cfg, const ProtocolParams& start,
                                   std::span<const std::uint64_t> seeds,
                                   const OptimizeOptions& opts = {},
                                   Execution exec = Execution::parallel);

}  // namespace entamp
