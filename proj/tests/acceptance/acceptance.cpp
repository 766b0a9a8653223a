// Acceptance checks against the published numbers. Usage:
//
//   entamp_acceptance            run every criterion
//   entamp_acceptance 2 8        run the listed criteria
//
// Each criterion prints its measurements indented, then one PASS or FAIL
// line. The exit status is non-zero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "entamp/config.hpp"
#include "entamp/io.hpp"
#include "entamp/leakage.hpp"
#include "entamp/metrics.hpp"
#include "entamp/noise.hpp"
#include "entamp/oracle.hpp"
#include "entamp/protocol.hpp"
#include "entamp/sweep.hpp"

using namespace entamp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string data(const std::string& name) { return std::string(ENTAMP_DATA_DIR) + "/" + name; }

// Collects individual checks of one criterion.
class Verdict {
 public:
  void check(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    std::printf("  %s %s\n", ok ? "ok  " : "MISS", what.c_str());
    std::fflush(stdout);
  }
  void note(const std::string& what) {
    std::printf("  .... %s\n", what.c_str());
    std::fflush(stdout);
  }
  bool ok() const { return ok_; }

 private:
  bool ok_ = true;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

const ParameterSet& row_with_n(const std::vector<ParameterSet>& rows, int n) {
  const auto it = std::find_if(rows.begin(), rows.end(),
                               [n](const ParameterSet& p) { return p.n_atoms == n; });
  if (it == rows.end()) throw std::runtime_error("no table row with N = " + std::to_string(n));
  return *it;
}

void table_check(Verdict& v, const std::vector<ParameterSet>& rows, const std::vector<SweepPoint>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const double ref = rows[i].reference_fidelity.value_or(NAN);
    if (!p.ok()) {
      v.check(false, fmt("N=%d eta=%g: %s", p.params.n_atoms, p.params.eta, p.error.c_str()));
      continue;
    }
    const double f = p.report->fidelity;
    v.check(std::abs(f - ref) <= 0.003,
            fmt("N=%-4d eta=%-4g F=%.4f  printed %.3f  diff %+.4f (tol 0.003)", p.params.n_atoms,
                p.params.eta, f, ref, f - ref));
  }
}

// ---------------------------------------------------------------------------

bool worked_example(Verdict& v) {
  const RunConfig rc = load_config(std::string(ENTAMP_CONFIG_DIR) + "/n100.toml");
  const auto t0 = Clock::now();
  const DickeState psi = run_protocol(rc.cavity(), rc.schedule());
  const GhzReport r = make_report(psi);
  const double elapsed = seconds_since(t0);
  v.check(std::abs(r.rho_pp - 0.462) <= 0.005, fmt("rho_pp %.4f (0.462 +- 0.005)", r.rho_pp));
  v.check(std::abs(r.rho_mm - 0.462) <= 0.005, fmt("rho_mm %.4f (0.462 +- 0.005)", r.rho_mm));
  v.check(std::abs(r.rho_pm.real() - 0.335) <= 0.005,
          fmt("Re rho_pm %.4f (0.335 +- 0.005)", r.rho_pm.real()));
  v.check(std::abs(r.rho_pm.imag() - 0.318) <= 0.005,
          fmt("Im rho_pm %.4f (0.318 +- 0.005)", r.rho_pm.imag()));
  v.note(fmt("|rho_pm| %.4f against |0.335+0.318i| = %.4f", std::abs(r.rho_pm),
             std::abs(cplx(0.335, 0.318))));
  v.check(std::abs(r.fidelity - 0.924) <= 0.002, fmt("fidelity %.4f (0.924 +- 0.002)", r.fidelity));
  v.check(elapsed < 5.0, fmt("runtime %.2f s including parity and QFI (< 5 s)", elapsed));
  return v.ok();
}

bool n_sweep(Verdict& v) {
  const auto rows = read_parameter_table(data("n_sweep.csv"));
  v.note(fmt("%zu rows in the published table", rows.size()));
  const auto pts = run_table(rows);
  table_check(v, rows, pts);
  const ParameterSet& big = row_with_n(rows, 2000);
  const auto t0 = Clock::now();
  const double f = ghz_fidelity(run_protocol(big.cavity(), big.schedule())).fidelity;
  const double elapsed = seconds_since(t0);
  v.check(elapsed < 300.0, fmt("N=2000 row alone: F=%.4f in %.2f s (< 300 s)", f, elapsed));
  return v.ok();
}

bool eta_sweep(Verdict& v) {
  const auto rows = read_parameter_table(data("eta_sweep.csv"));
  v.note(fmt("%zu rows", rows.size()));
  table_check(v, rows, run_table(rows));
  v.check(rows.size() == 10, "10 rows present");
  return v.ok();
}

bool empirical_formula(Verdict& v) {
  const auto by_n = read_parameter_table(data("n_sweep.csv"));
  auto by_eta = read_parameter_table(data("eta_sweep.csv"));
  std::erase_if(by_eta, [](const ParameterSet& p) { return p.eta < 200.0; });
  const int fixed[] = {100, 400, 800, 1200};
  const auto grid = empirical_grid(by_n, by_eta, fixed);
  const auto pts = run_table(grid);
  const LinearFit f = fit_empirical(pts);
  v.note(fmt("%zu points: N sweep at eta=200 plus eta sweeps at N=100,400,800,1200", f.points));
  v.check(std::abs(f.intercept - 0.981) <= 0.01, fmt("intercept %.4f (0.981 +- 0.01)", f.intercept));
  v.check(std::abs(f.slope + 2.31) <= 0.2, fmt("slope %.4f (-2.31 +- 0.2)", f.slope));
  v.note(fmt("R^2 %.4f; predicted F(100, 200) = %.4f", f.r_squared,
             f.intercept + f.slope * std::log(100.0) / 200.0));
  return v.ok();
}

bool scaling_laws(Verdict& v) {
  const auto rows = read_parameter_table(data("n_sweep.csv"));
  const ScalingReport r = fit_scalings(run_table(rows));
  auto slope = [&](const char* name, const LinearFit& f, double target) {
    v.check(std::abs(f.slope - target) <= 0.02,
            fmt("%-18s slope %+.4f (%+.3f +- 0.02)", name, f.slope, target));
  };
  slope("|delta2/Omega|", r.delta2_over_omega, 0.50);
  slope("|delta4/Omega|", r.delta4_over_omega, 0.707);
  slope("Omega t2", r.omega_t2, -0.50);
  slope("Omega t3", r.omega_t3, -0.50);
  slope("pi - Omega t1", r.pi_minus_omega_t1, -0.50);
  slope("pi - Omega t4", r.pi_minus_omega_t4, -0.50);
  v.check(r.p_decay_vs_ln_n.r_squared > 0.99,
          fmt("p_decay vs ln N: R^2 %.4f (> 0.99), slope %.4f", r.p_decay_vs_ln_n.r_squared,
              r.p_decay_vs_ln_n.slope));
  return v.ok();
}

// Spacing of successive maxima of the parity scan, each maximum refined by a
// parabola through its three samples.
double parity_period(const DickeState& psi, double lo, double hi, int samples) {
  std::vector<double> th(samples);
  for (int i = 0; i < samples; ++i) th[i] = lo + (hi - lo) * i / (samples - 1);
  const auto p = parity_scan(psi, th);
  const double h = th[1] - th[0];
  std::vector<double> peaks;
  for (int i = 1; i + 1 < samples; ++i) {
    if (p[i] > p[i - 1] && p[i] >= p[i + 1]) {
      const double denom = p[i - 1] - 2.0 * p[i] + p[i + 1];
      const double shift = denom != 0.0 ? 0.5 * (p[i - 1] - p[i + 1]) / denom : 0.0;
      peaks.push_back(th[i] + shift * h);
    }
  }
  if (peaks.size() < 2) return NAN;
  return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

bool parity(Verdict& v) {
  const RunConfig rc = load_config(std::string(ENTAMP_CONFIG_DIR) + "/n100.toml");
  const DickeState psi = run_protocol(rc.cavity(), rc.schedule());
  const int n = psi.n_atoms();
  const double expect = 2.0 * std::numbers::pi / n;
  // The two windows of the published scan, [-0.03 pi, 0.03 pi] and [0.47 pi, 0.53 pi].
  for (double centre : {0.0, 0.5 * std::numbers::pi}) {
    const double period = parity_period(psi, centre - 0.03 * std::numbers::pi,
                                        centre + 0.03 * std::numbers::pi, 1201);
    v.check(std::abs(period / expect - 1.0) <= 0.01,
            fmt("window at %.2f pi: period %.6f vs 2 pi/N = %.6f (%+.3f%%, tol 1%%)",
                centre / std::numbers::pi, period, expect, 100.0 * (period / expect - 1.0)));
  }
  const GhzReport r = ghz_fidelity(psi);
  const double vis = parity_visibility(psi);
  const double coh = 2.0 * std::abs(r.rho_pm) / r.survival;
  v.check(std::abs(vis - coh) <= 0.01,
          fmt("visibility %.4f vs 2|rho_pm|/survival %.4f (tol 0.01)", vis, coh));
  return v.ok();
}

bool fisher(Verdict& v) {
  const auto rows = read_parameter_table(data("n_sweep.csv"));
  const std::map<int, double> quoted = {{100, 81.0}, {500, 380.0}, {2000, 1420.0}};
  std::map<int, QfiPair> got;
  for (const auto& [n, target] : quoted) {
    const auto& p = row_with_n(rows, n);
    got[n] = quantum_fisher_information(run_protocol(p.cavity(), p.schedule()));
    v.note(fmt("N=%-4d normalized %.2f  weighted %.2f  (quoted %.0f)", n, got[n].normalized,
               got[n].weighted, target));
  }
  auto matches = [&](auto pick) {
    // 81 +- 8 and 1420 +- 150 carry stated tolerances; 380 is held to the same 10%.
    return std::abs(pick(got[100]) - 81.0) <= 8.0 && std::abs(pick(got[500]) - 380.0) <= 38.0 &&
           std::abs(pick(got[2000]) - 1420.0) <= 150.0;
  };
  const bool norm_ok = matches([](const QfiPair& q) { return q.normalized; });
  const bool weight_ok = matches([](const QfiPair& q) { return q.weighted; });
  v.check(norm_ok || weight_ok,
          fmt("one variant matches 81/380/1420 throughout (normalized %s, weighted %s)",
              norm_ok ? "yes" : "no", weight_ok ? "yes" : "no"));
  return v.ok();
}

bool noise_monte_carlo(Verdict& v) {
  const auto rows = read_parameter_table(data("n_sweep.csv"));
  const int trials = 400;
  struct Channel {
    const char* name;
    NoiseConfig cfg;
    std::map<int, double> target;
    double tol;
  };
  std::vector<Channel> channels = {
      {"timing+amplitude", NoiseConfig::timing_amplitude(),
       {{100, 0.923}, {500, 0.904}, {1000, 0.890}, {2000, 0.870}}, 0.01},
      {"shot+coupling", NoiseConfig::shot_inhomogeneous(), {{100, 0.904}}, 0.02},
      {"jitter", NoiseConfig::jitter(), {{100, 0.920}, {500, 0.881}, {1000, 0.856}, {2000, 0.831}}, 0.01},
      {"combined", NoiseConfig::combined(), {{100, 0.903}, {500, 0.867}, {1000, 0.845}, {2000, 0.817}}, 0.01},
  };
  for (auto& ch : channels) {
    ch.cfg.trials = trials;
    ch.cfg.seed = 1;
    for (const auto& [n, target] : ch.target) {
      const auto& p = row_with_n(rows, n);
      const auto t0 = Clock::now();
      const McResult mc = mc_fidelity(p.cavity(), p.schedule(), ch.cfg);
      const double tol = std::max(ch.tol, 3.0 * mc.std_error);
      v.check(std::abs(mc.mean.fidelity - target) <= tol,
              fmt("%-16s N=%-4d F=%.4f +- %.4f  published %.3f  diff %+.4f (tol %.4f)  [%d trials, %.0f s]",
                  ch.name, n, mc.mean.fidelity, mc.std_error, target, mc.mean.fidelity - target, tol,
                  mc.trials, seconds_since(t0)));
    }
  }
  return v.ok();
}

bool leakage(Verdict& v) {
  const RunConfig rc = load_config(std::string(ENTAMP_CONFIG_DIR) + "/n100.toml");
  const auto cfg = rc.cavity();
  const auto schedule = rc.schedule();

  const RVector kbar = kbar_profile(cfg, MirrorConfig::from_ppm(32, 32), 28.8);
  const double ratio = kbar[2] / kbar[1];
  const double quoted = 3.5 / 28.8;
  v.check(std::abs(ratio / quoted - 1.0) <= 0.05,
          fmt("kbar2/kbar1 %.4f vs 3.5/28.8 = %.4f (%+.1f%%, tol 5%%)", ratio, quoted,
              100.0 * (ratio / quoted - 1.0)));

  // The protocol's own photon number in the first drive step is the operating
  // point of the asymmetric designs; the symmetric figure is the optimum of
  // the tradeoff curve. The grid is geometric with that point added.
  const double operating = mean_photons(*schedule.steps[1].drive, cfg);
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(std::pow(10.0, 0.125 * i));
  grid.push_back(operating);
  std::sort(grid.begin(), grid.end());
  LeakageOptions opts;
  opts.trials = 200;
  opts.seed = 1;
  struct Case {
    double a, b, target;
    bool at_optimum;
  };
  for (const Case& c : {Case{32, 32, 0.769, true}, Case{5, 59, 0.853, false}, Case{1, 63, 0.891, false},
                        Case{3, 61, 0.867, false}}) {
    const auto t0 = Clock::now();
    const auto mirrors = MirrorConfig::from_ppm(c.a, c.b);
    const auto rows = leakage_tradeoff(cfg, schedule, mirrors, grid, opts);
    const auto best = std::max_element(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
      return x.fidelity_overall < y.fidelity_overall;
    });
    const auto at_op = std::find_if(rows.begin(), rows.end(),
                                    [&](const auto& r) { return r.kbar1 == operating; });
    double worst_completeness = 0.0;
    for (const auto& r : rows) worst_completeness = std::max(worst_completeness, r.completeness_error);
    const auto& gated = c.at_optimum ? *best : *at_op;
    v.check(std::abs(gated.fidelity_overall - c.target) <= 0.01,
            fmt("%g/%g ppm: F=%.4f +- %.4f at kbar1=%.1f (%s)  published %.3f  diff %+.4f (tol 0.01)  [%.0f s]",
                c.a, c.b, gated.fidelity_overall, gated.std_error_overall, gated.kbar1,
                c.at_optimum ? "optimum" : "operating point", c.target, gated.fidelity_overall - c.target,
                seconds_since(t0)));
    v.note(fmt("%g/%g ppm: optimum %.4f at kbar1=%.1f; at kbar1=%.1f leak %.4f shot %.4f overall %.4f "
               "product %.4f; transmitted kbar1 %.2f; POVM completeness %.1e",
               c.a, c.b, best->fidelity_overall, best->kbar1, operating, at_op->fidelity_leak,
               at_op->fidelity_shot, at_op->fidelity_overall, at_op->fidelity_multiplicative, at_op->kbar[1],
               worst_completeness));
  }
  return v.ok();
}

bool properties(Verdict& v) {
  {
    double worst = 0.0;
    for (int n = 1; n <= 12; ++n) {
      const auto ops = CollectiveOps::build(n);
      worst = std::max(worst, (ops.sx * ops.sy - ops.sy * ops.sx - kI * ops.sz).cwiseAbs().maxCoeff());
      const double s = 0.5 * n;
      const CMatrix cas = ops.sx * ops.sx + ops.sy * ops.sy + ops.sz * ops.sz;
      worst = std::max(worst, (cas - s * (s + 1) * CMatrix::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff());
    }
    v.check(worst < 1e-10, fmt("operator algebra ([Sx,Sy]=iSz, Casimir) max error %.1e", worst));
  }
  const auto rows = read_parameter_table(data("n_sweep.csv"));
  {
    double worst = 0.0;
    for (int n : {100, 1000, 2000}) {
      const auto& p = row_with_n(rows, n);
      const auto cfg = p.cavity();
      DickeState psi = make_css_up(n);
      for (const auto& st : p.schedule().steps) {
        if (st.drive) continue;
        const DickeState next = propagate_step(cfg, st, psi);
        worst = std::max(worst, std::abs(next.norm_squared() - psi.norm_squared()));
        psi = next;
      }
    }
    v.check(worst < 1e-10, fmt("light-off unitarity: max norm drift per step %.1e (< 1e-10)", worst));
  }
  {
    bool contracting = true;
    for (int n : {100, 1000}) {
      const auto& p = row_with_n(rows, n);
      DickeState psi = make_css_up(n);
      for (const auto& st : p.schedule().steps) {
        const DickeState next = propagate_step(p.cavity(), st, psi);
        if (st.drive && next.norm_squared() > psi.norm_squared() + 1e-12) contracting = false;
        psi = next;
      }
    }
    v.check(contracting, "sign-matched drives never increase the norm");
  }
  const auto& p100 = row_with_n(rows, 100);
  {
    ProtocolSchedule head = p100.schedule();
    head.steps.resize(2);
    const DickeState mid = run_protocol(p100.cavity(), head);
    double worst = 0.0;
    for (double k1 : {1.0, 10.0, 28.8, 100.0, 500.0}) {
      const RVector kbar = kbar_profile(p100.cavity(), MirrorConfig::from_ppm(32, 32), k1);
      double total = 0.0;
      for (const auto& b : apply_leakage(mid, kbar, default_kmax(kbar))) total += b.weight;
      worst = std::max(worst, std::abs(total - mid.norm_squared()));
    }
    v.check(worst < 1e-6, fmt("POVM completeness: max error %.1e (< 1e-6)", worst));
  }
  {
    double worst = 0.0;
    for (int n = 1; n <= kOracleMaxAtoms; ++n) {
      ParameterSet p = p100;
      p.n_atoms = n;
      p.t_us = {1.5 / n, 0.6, 0.3, 1.4};
      p.delta2_mhz = -2.0;
      p.delta4_mhz = -6.0;
      const auto a = run_protocol(p.cavity(), p.schedule());
      const auto b = full_product_oracle(p.cavity(), p.schedule());
      worst = std::max(worst, (a.amplitudes() - b.amplitudes()).norm());
    }
    v.check(worst < 1e-8, fmt("full product-space oracle, N = 1..4: max deviation %.1e (< 1e-8)", worst));
  }
  {
    double worst = 0.0;
    for (int n : {100, 500}) {
      const auto& p = row_with_n(rows, n);
      const auto direct = run_protocol(p.cavity(), p.schedule());
      const auto xz = run_protocol_xz(p.cavity(), p.schedule());
      const auto framed = rotate_z(direct, p.schedule().steps.back().phase);
      worst = std::max(worst, (xz.amplitudes() - framed.amplitudes()).norm());
    }
    v.check(worst < 1e-8, fmt("x/z rotation form equivalence: max deviation %.1e (< 1e-8)", worst));
  }
  {
    NoiseConfig all = NoiseConfig::combined();
    all.trials = 32;
    all.seed = 5;
    const auto a = mc_fidelity(p100.cavity(), p100.schedule(), all, Execution::serial);
    const auto b = mc_fidelity(p100.cavity(), p100.schedule(), all, Execution::parallel);
    const auto c = mc_fidelity(p100.cavity(), p100.schedule(), all, Execution::parallel);
    const bool mc_same = a.corners.rho_pm == b.corners.rho_pm && a.corners.rho_pp == b.corners.rho_pp &&
                         a.corners.rho_mm == b.corners.rho_mm && b.corners.rho_pm == c.corners.rho_pm &&
                         a.std_error == c.std_error;
    SweepOptions so;
    so.exec = Execution::serial;
    const std::vector<ParameterSet> few(rows.begin(), rows.begin() + 4);
    const auto ts = run_table(few, so);
    so.exec = Execution::parallel;
    const auto tp = run_table(few, so);
    bool table_same = true;
    for (std::size_t i = 0; i < few.size(); ++i) {
      table_same = table_same && ts[i].report->rho_pm == tp[i].report->rho_pm;
    }
    LeakageOptions lo;
    lo.trials = 8;
    lo.exec = Execution::serial;
    const std::vector<double> g = {5.0, 20.0};
    const auto ls = leakage_tradeoff(p100.cavity(), p100.schedule(), MirrorConfig::from_ppm(5, 59), g, lo);
    lo.exec = Execution::parallel;
    const auto lp = leakage_tradeoff(p100.cavity(), p100.schedule(), MirrorConfig::from_ppm(5, 59), g, lo);
    bool leak_same = true;
    for (std::size_t i = 0; i < g.size(); ++i) {
      leak_same = leak_same && ls[i].fidelity_overall == lp[i].fidelity_overall &&
                  ls[i].fidelity_leak == lp[i].fidelity_leak;
    }
    v.check(mc_same && table_same && leak_same,
            fmt("bitwise determinism under fixed seeds: Monte Carlo %s, table %s, leakage %s",
                mc_same ? "yes" : "no", table_same ? "yes" : "no", leak_same ? "yes" : "no"));
  }
  return v.ok();
}

struct Criterion {
  int id;
  const char* title;
  std::function<bool(Verdict&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "worked N=100 example", worked_example},
      {2, "N-sweep fidelities", n_sweep},
      {3, "eta-sweep fidelities", eta_sweep},
      {4, "empirical fidelity formula", empirical_formula},
      {5, "scaling laws", scaling_laws},
      {6, "parity oscillation", parity},
      {7, "Fisher information", fisher},
      {8, "noise Monte Carlo", noise_monte_carlo},
      {9, "information leakage", leakage},
      {10, "property suites", properties},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  if (wanted.empty()) {
    for (const auto& c : all) wanted.push_back(c.id);
  }

  int failures = 0;
  for (int id : wanted) {
    const auto it = std::find_if(all.begin(), all.end(), [id](const Criterion& c) { return c.id == id; });
    if (it == all.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    std::printf("criterion %d: %s\n", it->id, it->title);
    std::fflush(stdout);
    Verdict v;
    bool ok = false;
    const auto t0 = Clock::now();
    try {
      ok = it->run(v);
    } catch (const std::exception& e) {
      std::printf("  error: %s\n", e.what());
      ok = false;
    }
    std::printf("%s criterion %d (%s) [%.1f s]\n", ok ? "PASS" : "FAIL", it->id, it->title,
                seconds_since(t0));
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
