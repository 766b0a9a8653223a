#include "entamp/expm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace entamp {

TridiagonalGenerator::TridiagonalGenerator(CVector diag, CVector lower, CVector upper)
    : diag_(std::move(diag)), lower_(std::move(lower)), upper_(std::move(upper)) {
  if (diag_.size() < 1) throw std::invalid_argument("TridiagonalGenerator: empty generator");
  if (lower_.size() != diag_.size() - 1 || upper_.size() != diag_.size() - 1) {
    throw std::invalid_argument("TridiagonalGenerator: off-diagonals must have length dim - 1");
  }
}

TridiagonalGenerator TridiagonalGenerator::rotation(int n_atoms, double omega, double phase) {
  const int dim = n_atoms + 1;
  CVector lower(dim - 1), upper(dim - 1);
  // S_phi = (S_+ e^{-i phase} + S_- e^{i phase}) / 2
  const cplx down_phase = std::polar(0.5 * omega, -phase);
  const cplx up_phase = std::polar(0.5 * omega, phase);
  for (int n = 0; n + 1 < dim; ++n) {
    const double c = raising_coefficient(n_atoms, n);
    lower[n] = c * down_phase;
    upper[n] = c * up_phase;
  }
  return TridiagonalGenerator(CVector::Zero(dim), std::move(lower), std::move(upper));
}

TridiagonalGenerator& TridiagonalGenerator::add_diagonal(const CVector& d) {
  if (d.size() != diag_.size()) throw std::invalid_argument("add_diagonal: dimension mismatch");
  diag_ += d;
  return *this;
}

void TridiagonalGenerator::apply(const cplx* in, cplx* out) const {
  const int n = dim();
  const cplx* d = diag_.data();
  const cplx* lo = lower_.data();
  const cplx* up = upper_.data();
  if (n == 1) {
    out[0] = d[0] * in[0];
    return;
  }
  out[0] = d[0] * in[0] + up[0] * in[1];
  for (int k = 1; k + 1 < n; ++k) {
    out[k] = lo[k - 1] * in[k - 1] + d[k] * in[k] + up[k] * in[k + 1];
  }
  out[n - 1] = lo[n - 2] * in[n - 2] + d[n - 1] * in[n - 1];
}

double TridiagonalGenerator::norm_inf() const {
  const int n = dim();
  double best = 0.0;
  for (int k = 0; k < n; ++k) {
    double row = std::abs(diag_[k]);
    if (k > 0) row += std::abs(lower_[k - 1]);
    if (k + 1 < n) row += std::abs(upper_[k]);
    best = std::max(best, row);
  }
  return best;
}

bool TridiagonalGenerator::is_hermitian(double tol) const {
  for (int k = 0; k < dim(); ++k) {
    if (std::abs(diag_[k].imag()) > tol) return false;
  }
  for (int k = 0; k + 1 < dim(); ++k) {
    if (std::abs(lower_[k] - std::conj(upper_[k])) > tol) return false;
  }
  return true;
}

bool TridiagonalGenerator::has_hermitian_offdiagonal(double tol) const {
  for (int k = 0; k + 1 < dim(); ++k) {
    if (std::abs(lower_[k] - std::conj(upper_[k])) > tol) return false;
  }
  return true;
}

bool TridiagonalGenerator::all_finite() const {
  return diag_.allFinite() && lower_.allFinite() && upper_.allFinite();
}

CMatrix TridiagonalGenerator::dense() const {
  const int n = dim();
  CMatrix h = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) h(k, k) = diag_[k];
  for (int k = 0; k + 1 < n; ++k) {
    h(k + 1, k) = lower_[k];
    h(k, k + 1) = upper_[k];
  }
  return h;
}

CMatrix expm_pade(const CMatrix& a) {
  constexpr int kDegree = 6;
  const Eigen::Index n = a.rows();
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / 0.5))));
  const CMatrix scaled = a / std::ldexp(1.0, squarings);

  // c_k = (2p - k)! p! / ((2p)! k! (p - k)!)
  double coef[kDegree + 1];
  coef[0] = 1.0;
  for (int k = 1; k <= kDegree; ++k) {
    coef[k] = coef[k - 1] * (kDegree + 1 - k) / (k * (2.0 * kDegree + 1 - k));
  }
  const CMatrix ident = CMatrix::Identity(n, n);
  CMatrix power = ident;
  CMatrix numer = coef[0] * ident;
  CMatrix denom = coef[0] * ident;
  for (int k = 1; k <= kDegree; ++k) {
    power = power * scaled;
    numer += coef[k] * power;
    denom += ((k % 2) ? -coef[k] : coef[k]) * power;
  }
  CMatrix result = denom.partialPivLu().solve(numer);
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

namespace {

// Two significant digits, rounded up; keeps substep lengths reproducible.
double round_step(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) return t;
  const double s = std::pow(10.0, std::floor(std::log10(t)) - 1.0);
  return std::ceil(t / s) * s;
}

CVector krylov_apply(const TridiagonalGenerator& h, double t, const CVector& v,
                     const ExpmOptions& opts, ExpmStats* stats) {
  const double beta0 = v.norm();
  const int n = h.dim();
  // Work in rescaled time tau in [0, 1] with A = -i t H, so the per-unit-time
  // error bound is also the bound on the whole interval.
  const cplx scale = -kI * t;
  const double anorm = std::max(std::abs(t) * h.norm_inf(), std::numeric_limits<double>::min());
  const int m = std::max(1, std::min(opts.krylov_dim, n));
  const double tol = opts.tol;
  constexpr int kMaxRejections = 20;
  constexpr int kMaxSubsteps = 1000000;
  int substeps = 0;
  constexpr double kGamma = 0.9;
  constexpr double kDelta = 1.2;
  const double btol = 1e-12 * std::max(1.0, anorm) * beta0;  // happy-breakdown threshold

  CMatrix basis(n, m + 1);
  CMatrix hess(m + 2, m + 2);
  CVector w = v;
  CVector p(n);
  double beta = beta0;

  const double fact = std::pow((m + 1) / std::exp(1.0), m + 1) * std::sqrt(kTwoPi * (m + 1));
  double t_now = 0.0;
  double t_new = round_step((1.0 / anorm) * std::pow((fact * tol) / (4.0 * anorm), 1.0 / m));
  double xm = 1.0 / m;

  while (t_now < 1.0) {
    double t_step = std::min(1.0 - t_now, t_new);
    hess.setZero();
    basis.col(0) = w / beta;
    int m_used = m;
    bool breakdown = false;
    for (int j = 0; j < m; ++j) {
      h.apply(basis.col(j).data(), p.data());
      if (stats) ++stats->matvecs;
      p *= scale;
      for (int i = 0; i <= j; ++i) {
        const cplx hij = basis.col(i).dot(p);
        hess(i, j) = hij;
        p -= hij * basis.col(i);
      }
      const double s = p.norm();
      if (s < btol) {
        breakdown = true;
        m_used = j + 1;
        t_step = 1.0 - t_now;
        break;
      }
      hess(j + 1, j) = s;
      basis.col(j + 1) = p / s;
    }
    double avnorm = 0.0;
    if (!breakdown) {
      hess(m + 1, m) = 1.0;
      h.apply(basis.col(m).data(), p.data());
      avnorm = std::abs(t) * p.norm();
    }

    CMatrix f;
    double err_loc = 0.0;
    int rejections = 0;
    for (;;) {
      const int mx = breakdown ? m_used : m + 2;
      f = expm_pade(t_step * hess.topLeftCorner(mx, mx));
      if (breakdown) {
        err_loc = btol;
        break;
      }
      const double p1 = std::abs(f(m, 0)) * beta;
      const double p2 = std::abs(f(m + 1, 0)) * beta * avnorm;
      if (p1 > 10.0 * p2) {
        err_loc = p2;
        xm = 1.0 / m;
      } else if (p1 > p2) {
        err_loc = p1 * p2 / (p1 - p2);
        xm = 1.0 / m;
      } else {
        err_loc = p1;
        xm = 1.0 / std::max(1, m - 1);
      }
      if (err_loc <= kDelta * t_step * tol * beta0) break;
      if (++rejections > kMaxRejections) {
        throw PropagationError("expm_apply: step-size control failed to converge");
      }
      t_step = round_step(kGamma * t_step * std::pow(t_step * tol * beta0 / err_loc, xm));
      if (stats) ++stats->rejections;
    }

    const int mx = breakdown ? m_used : m + 1;
    w = basis.leftCols(mx) * (beta * f.col(0).head(mx));
    beta = w.norm();
    if (!std::isfinite(beta)) throw PropagationError("expm_apply: propagation diverged");
    t_now += t_step;
    if (++substeps > kMaxSubsteps) throw PropagationError("expm_apply: more than 1e6 Krylov substeps");
    if (stats) {
      ++stats->substeps;
      stats->error_estimate += err_loc;
    }
    if (beta == 0.0) break;
    if (breakdown) break;
    t_new = round_step(kGamma * t_step * std::pow(t_step * tol * beta0 / std::max(err_loc, 1e-300), xm));
  }
  return w;
}

// Semi-axis parameter eta of the smallest Bernstein ellipse cosh(eta) x
// sinh(eta) holding the rectangle [-1, 1] x [-e, e].
double ellipse_parameter(double e) {
  if (e == 0.0) return 0.0;
  auto outside = [e](double eta) {
    const double c = std::cosh(eta), s = std::sinh(eta);
    return 1.0 / (c * c) + e * e / (s * s) > 1.0;
  };
  double lo = 0.0, hi = 1.0;
  while (outside(hi)) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (outside(mid) ? lo : hi) = mid;
  }
  return hi;
}

CVector chebyshev_apply(const TridiagonalGenerator& h, double t, const CVector& v,
                        const ExpmOptions& opts, ExpmStats* stats) {
  constexpr double kCrouzeix = 1.0 + 1.4142135623730951;
  constexpr double kMaxSliceTau = 400.0;
  constexpr double kMaxSlices = 1e7;
  const int n = h.dim();
  const double sign = t < 0.0 ? -1.0 : 1.0;
  const double duration = std::abs(t);

  // Rectangle holding the numerical range of sign * H: Gershgorin on the
  // Hermitian part, diagonal extremes on the anti-Hermitian part.
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (int k = 0; k < n; ++k) {
    double radius = 0.0;
    if (k > 0) radius += std::abs(h.lower()[k - 1]);
    if (k + 1 < n) radius += std::abs(h.upper()[k]);
    const cplx d = sign * h.diag()[k];
    xlo = std::min(xlo, d.real() - radius);
    xhi = std::max(xhi, d.real() + radius);
    ylo = std::min(ylo, d.imag());
    yhi = std::max(yhi, d.imag());
  }
  const cplx center(0.5 * (xlo + xhi), 0.5 * (ylo + yhi));
  const double r = std::max(0.5 * (xhi - xlo), std::numeric_limits<double>::min());
  const double eta = ellipse_parameter(0.5 * (yhi - ylo) / r);

  // Keep tau * sinh(eta) <= 1 per slice so partial sums stay O(1).
  const double tau = r * duration;
  const double want = std::max({1.0, std::ceil(tau * std::sinh(eta)), std::ceil(tau / kMaxSliceTau)});
  if (!(want <= kMaxSlices)) {
    throw PropagationError("expm_apply: step needs more than 1e7 Chebyshev slices");
  }
  const int slices = static_cast<int>(want);
  const double tau_s = tau / slices;
  const double dt = duration / slices;
  const cplx prefactor = std::exp(-kI * dt * center);
  // Errors made in one slice are not amplified by later ones beyond
  // exp(yhi * remaining time).
  const double growth = std::exp(std::max(0.0, yhi) * duration);
  const double slice_tol =
      opts.tol / (slices * growth * std::max(1.0, std::abs(prefactor)));

  std::vector<double> bessel, tail;
  int kmax = static_cast<int>(std::ceil(1.5 * tau_s * std::cosh(eta))) + 80;
  for (;;) {
    bessel = bessel_j_sequence(tau_s, kmax);
    tail.assign(kmax + 2, 0.0);
    for (int k = kmax; k >= 0; --k) {
      tail[k] = tail[k + 1] + 2.0 * kCrouzeix * std::abs(bessel[k]) * std::cosh(k * eta);
    }
    if (tail[kmax] < 1e-3 * slice_tol) break;
    kmax *= 2;
    if (kmax > 1000000) throw PropagationError("expm_apply: Chebyshev series does not converge");
  }
  int terms = 1;
  while (terms <= kmax && tail[terms] > slice_tol) ++terms;

  std::vector<cplx> coef(terms);
  const cplx minus_i[4] = {1.0, -kI, -1.0, kI};
  for (int k = 0; k < terms; ++k) coef[k] = (k == 0 ? 1.0 : 2.0) * minus_i[k % 4] * bessel[k];

  // Scaled generator (sign * H - center) / r.
  CVector sd(n), sl(std::max(0, n - 1)), su(std::max(0, n - 1));
  for (int k = 0; k < n; ++k) sd[k] = (sign * h.diag()[k] - center) / r;
  for (int k = 0; k + 1 < n; ++k) {
    sl[k] = sign * h.lower()[k] / r;
    su[k] = sign * h.upper()[k] / r;
  }
  auto step = [&](const cplx* cur, const cplx* prev, double a, cplx* out) {
    // out = a * Hs cur - prev  (prev may be null)
    for (int k = 0; k < n; ++k) {
      cplx y = sd[k] * cur[k];
      if (k > 0) y += sl[k - 1] * cur[k - 1];
      if (k + 1 < n) y += su[k] * cur[k + 1];
      out[k] = prev ? a * y - prev[k] : a * y;
    }
  };

  CVector w = v, t0(n), t1(n), t2(n), acc(n);
  for (int s = 0; s < slices; ++s) {
    t0 = w;
    acc = coef[0] * t0;
    if (terms > 1) {
      step(t0.data(), nullptr, 1.0, t1.data());
      acc += coef[1] * t1;
    }
    cplx* prev = t0.data();
    cplx* cur = t1.data();
    cplx* next = t2.data();
    for (int k = 2; k < terms; ++k) {
      step(cur, prev, 2.0, next);
      const cplx c = coef[k];
      for (int i = 0; i < n; ++i) acc[i] += c * next[i];
      std::swap(prev, cur);
      std::swap(cur, next);
    }
    w = prefactor * acc;
    if (!w.allFinite()) throw PropagationError("expm_apply: propagation diverged");
  }
  if (stats) {
    stats->substeps = slices;
    stats->matvecs = static_cast<long>(slices) * (terms - 1);
    stats->error_estimate = slices * tail[terms] * std::abs(prefactor) * growth * v.norm();
  }
  return w;
}

}  // namespace

std::vector<double> bessel_j_sequence(double x, int kmax) {
  if (!(x >= 0.0) || kmax < 0) throw std::invalid_argument("bessel_j_sequence: need x >= 0, kmax >= 0");
  std::vector<double> j(kmax + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  // Start well above both the order and the argument; the backward
  // recurrence is then stable and the normalization sum fixes the scale.
  const double top = std::max<double>(kmax, std::ceil(x));
  const int start = 2 * ((static_cast<int>(top) + 30 + static_cast<int>(std::sqrt(60.0 * top))) / 2);
  double above = 0.0, here = 1e-300, sum = 0.0;
  for (int k = start; k > 0; --k) {
    const double below = (2.0 * k / x) * here - above;  // J_{k-1}
    above = here;
    here = below;
    if (k - 1 <= kmax) j[k - 1] = here;
    if (k - 1 > 0 && (k - 1) % 2 == 0) sum += 2.0 * here;
    if (std::abs(here) > 1e250) {
      here *= 1e-250;
      above *= 1e-250;
      sum *= 1e-250;
      for (int i = std::max(0, k - 1); i <= kmax; ++i) j[i] *= 1e-250;
    }
  }
  sum += here;
  for (double& x_k : j) x_k /= sum;
  return j;
}

CVector expm_apply(const TridiagonalGenerator& h, double t, const CVector& v,
                   const ExpmOptions& opts, ExpmStats* stats) {
  if (v.size() != h.dim()) throw std::invalid_argument("expm_apply: dimension mismatch");
  if (!(opts.tol >= 1e-14 && opts.tol <= 1e-6)) {
    throw std::invalid_argument("expm_apply: tolerance must lie in [1e-14, 1e-6]");
  }
  if (!h.all_finite() || !v.allFinite() || !std::isfinite(t)) {
    throw PropagationError("expm_apply: non-finite generator, time or state");
  }
  if (stats) *stats = {};
  if (t == 0.0 || v.norm() == 0.0) return v;

  const bool offdiag_zero = h.lower().cwiseAbs().sum() == 0.0 && h.upper().cwiseAbs().sum() == 0.0;
  if (offdiag_zero) {
    CVector out(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = std::exp(-kI * t * h.diag()[k]) * v[k];
    return out;
  }
  bool chebyshev = opts.method == ExpmMethod::chebyshev;
  if (opts.method == ExpmMethod::automatic) chebyshev = h.has_hermitian_offdiagonal(1e-14 * h.norm_inf());
  if (chebyshev) {
    if (!h.has_hermitian_offdiagonal(1e-12 * h.norm_inf())) {
      throw std::invalid_argument("expm_apply: Chebyshev propagation needs a Hermitian off-diagonal");
    }
    return chebyshev_apply(h, t, v, opts, stats);
  }
  return krylov_apply(h, t, v, opts, stats);
}

DickeState expm_apply(const TridiagonalGenerator& h, double t, const DickeState& state,
                      double tol) {
  ExpmOptions opts;
  opts.tol = tol;
  return DickeState(state.n_atoms(), expm_apply(h, t, state.amplitudes(), opts));
}

}  // namespace entamp
