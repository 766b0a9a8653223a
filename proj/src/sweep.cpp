#include "entamp/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace entamp {

CavityConfig ParameterSet::cavity() const {
  return CavityConfig::from_mhz(n_atoms, eta, kappa_mhz, gamma_mhz, delta_over_gamma);
}

ProtocolParams ParameterSet::protocol() const {
  ProtocolParams p;
  p.omega = from_mhz(omega_mhz);
  p.t = t_us;
  p.phi3 = phi3;
  p.phi4 = phi4;
  p.delta2 = from_mhz(delta2_mhz);
  p.delta4 = from_mhz(delta4_mhz);
  p.ideal_boundary = ideal_boundary;
  return p;
}

std::vector<SweepPoint> run_table(std::span<const ParameterSet> rows, const SweepOptions& opts) {
  std::vector<SweepPoint> out(rows.size());
  const auto reports = parallel_map(
      rows.size(),
      [&](std::size_t i) -> std::pair<std::optional<GhzReport>, std::string> {
        try {
          const DickeState psi = run_protocol(rows[i].cavity(), rows[i].schedule(), opts.propagation);
          GhzReport r = ghz_fidelity(psi);
          const QfiPair q = quantum_fisher_information(psi);
          r.qfi_normalized = q.normalized;
          r.qfi_weighted = q.weighted;
          if (opts.parity && r.survival > 0.0) r.parity_visibility = parity_visibility(psi);
          return {r, {}};
        } catch (const std::exception& e) {
          return {std::nullopt, e.what()};
        }
      },
      opts.exec);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[i].params = rows[i];
    out[i].report = reports[i].first;
    out[i].error = reports[i].second;
  }
  return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 1e-300) || !std::isfinite(sxx)) {
    throw std::invalid_argument("fit_line: degenerate design (constant abscissa)");
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = x.size();
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss_res += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

LinearFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("fit_power_law: values must be positive");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

ScalingReport fit_scalings(std::span<const SweepPoint> points) {
  std::vector<double> n, d2, d4, t2, t3, t1c, t4c, lnn, pdec;
  for (const auto& p : points) {
    if (!p.ok()) continue;
    const ProtocolParams pr = p.params.protocol();
    n.push_back(p.params.n_atoms);
    d2.push_back(std::abs(pr.delta2 / pr.omega));
    d4.push_back(std::abs(pr.delta4 / pr.omega));
    t1c.push_back(std::numbers::pi - pr.omega * pr.t[0]);
    t2.push_back(pr.omega * pr.t[1]);
    t3.push_back(pr.omega * pr.t[2]);
    t4c.push_back(std::numbers::pi - pr.omega * pr.t[3]);
    lnn.push_back(std::log(static_cast<double>(p.params.n_atoms)));
    pdec.push_back(p.report->p_decay);
  }
  if (n.size() < 5) throw std::invalid_argument("fit_scalings: need at least 5 successful points");
  const auto [lo, hi] = std::minmax_element(n.begin(), n.end());
  if (*hi < 10.0 * *lo) throw std::invalid_argument("fit_scalings: N must span at least a decade");
  ScalingReport r;
  r.delta2_over_omega = fit_power_law(n, d2);
  r.delta4_over_omega = fit_power_law(n, d4);
  r.omega_t2 = fit_power_law(n, t2);
  r.omega_t3 = fit_power_law(n, t3);
  r.pi_minus_omega_t1 = fit_power_law(n, t1c);
  r.pi_minus_omega_t4 = fit_power_law(n, t4c);
  r.p_decay_vs_ln_n = fit_line(lnn, pdec);
  return r;
}

std::vector<ParameterSet> empirical_grid(std::span<const ParameterSet> by_n,
                                         std::span<const ParameterSet> by_eta,
                                         std::span<const int> fixed_n) {
  std::vector<ParameterSet> out(by_n.begin(), by_n.end());
  for (const int n : fixed_n) {
    const auto row = std::find_if(by_n.begin(), by_n.end(),
                                  [n](const ParameterSet& p) { return p.n_atoms == n; });
    if (row == by_n.end()) throw std::invalid_argument("empirical_grid: no row for N = " + std::to_string(n));
    for (const auto& e : by_eta) {
      ParameterSet p = *row;
      p.eta = e.eta;
      p.delta_over_gamma = e.delta_over_gamma;
      p.reference_fidelity.reset();
      out.push_back(p);
    }
  }
  return out;
}

LinearFit fit_empirical(std::span<const SweepPoint> points) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!p.ok()) continue;
    x.push_back(std::log(static_cast<double>(p.params.n_atoms)) / p.params.eta);
    y.push_back(p.report->fidelity);
  }
  return fit_line(x, y);
}

namespace {

constexpr int kDim = 8;
using Vec = std::array<double, kDim>;

struct Box {
  Vec center{};
  Vec half{};

  ProtocolParams params(const Vec& u, const ProtocolParams& base) const {
    ProtocolParams p = base;
    Vec x{};
    for (int i = 0; i < kDim; ++i) x[i] = center[i] + half[i] * std::clamp(u[i], -1.0, 1.0);
    for (int i = 0; i < 4; ++i) p.t[i] = x[i];
    p.phi3 = x[4];
    p.phi4 = x[5];
    p.delta2 = x[6];
    p.delta4 = x[7];
    return p;
  }
};

Box make_box(const ProtocolParams& p, const OptimizeOptions& o) {
  Box b;
  b.center = {p.t[0], p.t[1], p.t[2], p.t[3], p.phi3, p.phi4, p.delta2, p.delta4};
  for (int i = 0; i < 4; ++i) b.half[i] = std::max(std::abs(p.t[i]) * o.time_box, 1e-6);
  b.half[4] = b.half[5] = o.phase_box;
  b.half[6] = std::max(std::abs(p.delta2) * o.drive_box, 1e-6);
  b.half[7] = std::max(std::abs(p.delta4) * o.drive_box, 1e-6);
  return b;
}

}  // namespace

OptimizeResult optimize_schedule(const CavityConfig& cfg, const ProtocolParams& start,
                                 const OptimizeOptions& opts) {
  const Box box = make_box(start, opts);
  OptimizeResult res;
  auto objective = [&](const Vec& u) {
    ++res.evaluations;
    try {
      const double f =
          ghz_fidelity(run_protocol(cfg, ProtocolSchedule::canonical(box.params(u, start)),
                                    opts.propagation))
              .fidelity;
      return std::isfinite(f) ? -f : std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto clamp = [](Vec u) {
    for (auto& v : u) v = std::clamp(v, -1.0, 1.0);
    return u;
  };

  const double f0 = objective(Vec{});
  res.params = start;
  res.initial_fidelity = std::isfinite(f0) ? -f0 : -std::numeric_limits<double>::infinity();
  res.fidelity = res.initial_fidelity;
  if (opts.max_evaluations <= 0) return res;

  std::mt19937_64 rng(splitmix64(opts.seed));
  std::array<Vec, kDim + 1> simplex{};
  std::array<double, kDim + 1> value{};
  value[0] = f0;
  for (int i = 0; i < kDim; ++i) {
    const double sign = (rng() & 1U) ? 1.0 : -1.0;
    simplex[i + 1][i] = sign * opts.initial_step;
    value[i + 1] = objective(simplex[i + 1]);
  }

  std::array<int, kDim + 1> order{};
  while (res.evaluations < opts.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return value[a] < value[b]; });
    const int best = order.front(), worst = order.back(), second = order[kDim - 1];
    if (std::isfinite(value[worst]) && value[worst] - value[best] < opts.tolerance) break;

    Vec centroid{};
    for (int i = 0; i <= kDim; ++i) {
      if (i == worst) continue;
      for (int d = 0; d < kDim; ++d) centroid[d] += simplex[i][d] / kDim;
    }
    auto along = [&](double coef) {
      Vec v{};
      for (int d = 0; d < kDim; ++d) v[d] = centroid[d] + coef * (simplex[worst][d] - centroid[d]);
      return clamp(v);
    };

    const Vec xr = along(-1.0);
    const double fr = objective(xr);
    if (fr < value[best]) {
      const Vec xe = along(-2.0);
      const double fe = objective(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        value[worst] = fe;
      } else {
        simplex[worst] = xr;
        value[worst] = fr;
      }
      continue;
    }
    if (fr < value[second]) {
      simplex[worst] = xr;
      value[worst] = fr;
      continue;
    }
    const bool outside = fr < value[worst];
    const Vec xc = along(outside ? -0.5 : 0.5);
    const double fc = objective(xc);
    if (fc < (outside ? fr : value[worst])) {
      simplex[worst] = xc;
      value[worst] = fc;
      continue;
    }
    for (int i = 0; i <= kDim; ++i) {
      if (i == best) continue;
      for (int d = 0; d < kDim; ++d) simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
      value[i] = objective(simplex[i]);
    }
  }

  const int best = static_cast<int>(std::min_element(value.begin(), value.end()) - value.begin());
  if (std::isfinite(value[best]) && -value[best] > res.fidelity) {
    res.fidelity = -value[best];
    res.params = box.params(simplex[best], start);
  }
  return res;
}

OptimizeResult optimize_multistart(const CavityConfig& cfg, const ProtocolParams& start,
                                   std::span<const std::uint64_t> seeds,
                                   const OptimizeOptions& opts, Execution exec) {
  if (seeds.empty()) return optimize_schedule(cfg, start, opts);
  const auto results = parallel_map(
      seeds.size(),
      [&](std::size_t i) {
        OptimizeOptions o = opts;
        o.seed = seeds[i];
        return optimize_schedule(cfg, start, o);
      },
      exec);
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].fidelity > results[best].fidelity) best = i;
  }
  OptimizeResult r = results[best];
  r.evaluations = 0;
  for (const auto& x : results) r.evaluations += x.evaluations;
  return r;
}

}  // namespace entamp
