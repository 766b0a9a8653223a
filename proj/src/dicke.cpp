#include "entamp/dicke.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace entamp {

DickeState::DickeState(int n_atoms, CVector amplitudes)
    : n_atoms_(n_atoms), amps_(std::move(amplitudes)) {
  if (n_atoms_ < 1) throw std::invalid_argument("DickeState: need at least one atom");
  if (amps_.size() != n_atoms_ + 1) {
    throw std::invalid_argument("DickeState: expected " + std::to_string(n_atoms_ + 1) +
                                " amplitudes, got " + std::to_string(amps_.size()));
  }
  if (!amps_.allFinite()) throw std::invalid_argument("DickeState: non-finite amplitude");
}

DickeState DickeState::normalized() const {
  const double nrm = amps_.norm();
  if (nrm == 0.0) throw std::domain_error("DickeState: cannot normalize a zero vector");
  return DickeState(n_atoms_, amps_ / nrm);
}

double raising_coefficient(int n_atoms, int n) {
  return std::sqrt(static_cast<double>(n + 1) * static_cast<double>(n_atoms - n));
}

double log_binomial(int n_atoms, int n) {
  return std::lgamma(n_atoms + 1.0) - std::lgamma(n + 1.0) - std::lgamma(n_atoms - n + 1.0);
}

CollectiveOps CollectiveOps::build(int n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("CollectiveOps: need at least one atom");
  const int dim = n_atoms + 1;
  CollectiveOps ops;
  ops.n_atoms = n_atoms;
  ops.sz = CMatrix::Zero(dim, dim);
  ops.s_plus = CMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) ops.sz(n, n) = n - 0.5 * n_atoms;
  for (int n = 0; n + 1 < dim; ++n) ops.s_plus(n + 1, n) = raising_coefficient(n_atoms, n);
  ops.s_minus = ops.s_plus.adjoint();
  ops.sx = 0.5 * (ops.s_plus + ops.s_minus);
  ops.sy = (ops.s_plus - ops.s_minus) / (2.0 * kI);
  return ops;
}

CMatrix CollectiveOps::s_phi(double phi) const { return std::cos(phi) * sx + std::sin(phi) * sy; }

DickeState make_css_up(int n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("make_css_up: N must be at least 1");
  CVector a = CVector::Zero(n_atoms + 1);
  a[n_atoms] = 1.0;
  return DickeState(n_atoms, std::move(a));
}

DickeState spin_coherent(int n_atoms, double theta, double phi) {
  if (n_atoms < 1) throw std::invalid_argument("spin_coherent: N must be at least 1");
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw std::invalid_argument("spin_coherent: theta must lie in [0, pi]");
  }
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  CVector a(n_atoms + 1);
  for (int n = 0; n <= n_atoms; ++n) {
    const int down = n_atoms - n;
    // Exact zeros at the poles keep 0 * log(0) out of the sum.
    if ((n > 0 && c == 0.0) || (down > 0 && s == 0.0)) {
      a[n] = 0.0;
      continue;
    }
    double log_mag = 0.5 * log_binomial(n_atoms, n);
    if (n > 0) log_mag += n * std::log(c);
    if (down > 0) log_mag += down * std::log(s);
    a[n] = std::polar(std::exp(log_mag), down * phi);
  }
  return DickeState(n_atoms, std::move(a));
}

namespace {

// Real magnitudes of the coherent-state amplitudes; the azimuth enters as e^{i(N-n)phi}.
RVector coherent_magnitudes(int n_atoms, double theta) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  RVector b(n_atoms + 1);
  for (int n = 0; n <= n_atoms; ++n) {
    const int down = n_atoms - n;
    if ((n > 0 && c == 0.0) || (down > 0 && s == 0.0)) {
      b[n] = 0.0;
      continue;
    }
    double log_mag = 0.5 * log_binomial(n_atoms, n);
    if (n > 0) log_mag += n * std::log(c);
    if (down > 0) log_mag += down * std::log(s);
    b[n] = std::exp(log_mag);
  }
  return b;
}

double husimi_value(const RVector& mags, const CVector& psi, int n_atoms, double phi) {
  // <theta,phi|psi> = sum_n b_n e^{-i(N-n)phi} psi_n
  cplx overlap = 0.0;
  const cplx step = std::polar(1.0, phi);
  cplx rot = 1.0;  // e^{i(N-n)phi} built from n = N downwards
  for (int n = n_atoms; n >= 0; --n) {
    overlap += mags[n] * std::conj(rot) * psi[n];
    rot *= step;
  }
  return (n_atoms + 1) / (4.0 * std::numbers::pi) * std::norm(overlap);
}

}  // namespace

std::vector<double> husimi_q(const DickeState& state, std::span<const SphericalPoint> grid) {
  std::vector<double> out;
  if (grid.empty()) return out;
  const DickeState psi = state.normalized();
  out.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const RVector mags = coherent_magnitudes(psi.n_atoms(), grid[i].theta);
    out[i] = husimi_value(mags, psi.amplitudes(), psi.n_atoms(), grid[i].phi);
  }
  return out;
}

HusimiMap husimi_map(const DickeState& state, int n_theta, int n_phi, Execution exec) {
  if (n_theta < 1 || n_phi < 1) throw std::invalid_argument("husimi_map: empty grid");
  const DickeState psi = state.normalized();
  HusimiMap map;
  map.n_theta = n_theta;
  map.n_phi = n_phi;
  map.theta.resize(n_theta);
  map.phi.resize(n_phi);
  map.values.assign(static_cast<std::size_t>(n_theta) * n_phi, 0.0);
  for (int i = 0; i < n_theta; ++i) map.theta[i] = (i + 0.5) * std::numbers::pi / n_theta;
  for (int j = 0; j < n_phi; ++j) map.phi[j] = (j + 0.5) * kTwoPi / n_phi;

  const auto rows = parallel_map(
      static_cast<std::size_t>(n_theta),
      [&](std::size_t i) {
        const RVector mags = coherent_magnitudes(psi.n_atoms(), map.theta[i]);
        std::vector<double> row(n_phi);
        for (int j = 0; j < n_phi; ++j) row[j] = husimi_value(mags, psi.amplitudes(), psi.n_atoms(), map.phi[j]);
        return row;
      },
      exec);
  for (int i = 0; i < n_theta; ++i) {
    std::copy(rows[i].begin(), rows[i].end(), map.values.begin() + static_cast<std::ptrdiff_t>(i) * n_phi);
  }
  return map;
}

double HusimiMap::integral() const {
  const double d_theta = std::numbers::pi / n_theta;
  const double d_phi = kTwoPi / n_phi;
  double total = 0.0;
  for (int i = 0; i < n_theta; ++i) {
    double row = 0.0;
    for (int j = 0; j < n_phi; ++j) row += at(i, j);
    total += row * std::sin(theta[i]);
  }
  return total * d_theta * d_phi;
}

void write_husimi_csv(const HusimiMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "theta,phi,q\n" << std::setprecision(17);
  for (int i = 0; i < map.n_theta; ++i) {
    for (int j = 0; j < map.n_phi; ++j) {
      out << map.theta[i] << ',' << map.phi[j] << ',' << map.at(i, j) << '\n';
    }
  }
}

void write_husimi_binary(const HusimiMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << map.n_theta << ' ' << map.n_phi << '\n';
  out.write(reinterpret_cast<const char*>(map.values.data()),
            static_cast<std::streamsize>(map.values.size() * sizeof(double)));
}

HusimiMap read_husimi_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  HusimiMap map;
  if (!(hs >> map.n_theta >> map.n_phi) || map.n_theta < 1 || map.n_phi < 1) {
    throw std::runtime_error("malformed Husimi header in " + path);
  }
  map.values.resize(static_cast<std::size_t>(map.n_theta) * map.n_phi);
  in.read(reinterpret_cast<char*>(map.values.data()),
          static_cast<std::streamsize>(map.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated Husimi grid in " + path);
  map.theta.resize(map.n_theta);
  map.phi.resize(map.n_phi);
  for (int i = 0; i < map.n_theta; ++i) map.theta[i] = (i + 0.5) * std::numbers::pi / map.n_theta;
  for (int j = 0; j < map.n_phi; ++j) map.phi[j] = (j + 0.5) * kTwoPi / map.n_phi;
  return map;
}

}  // namespace entamp
