#include "entamp/oracle.hpp"

#include <bit>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace entamp {

namespace {

struct ProductOps {
  CMatrix sx, sy;
  std::vector<int> up_count;  // popcount of each product basis index (bit set = |up>)
};

ProductOps build_product_ops(int n_atoms) {
  const int dim = 1 << n_atoms;
  ProductOps ops;
  ops.sx = CMatrix::Zero(dim, dim);
  ops.sy = CMatrix::Zero(dim, dim);
  ops.up_count.resize(dim);
  for (int b = 0; b < dim; ++b) {
    ops.up_count[b] = std::popcount(static_cast<unsigned>(b));
    for (int atom = 0; atom < n_atoms; ++atom) {
      const int flipped = b ^ (1 << atom);
      const bool up = (b >> atom) & 1;
      // sigma_x/2 and sigma_y/2 on this atom; sigma_y|down> = -i|up>, sigma_y|up> = i|down>
      ops.sx(flipped, b) += 0.5;
      ops.sy(flipped, b) += up ? cplx(0.0, 0.5) : cplx(0.0, -0.5);
    }
  }
  return ops;
}

}  // namespace

DickeState full_product_oracle(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                               std::optional<DickeState> initial, const PropagationOptions& opts) {
  const int n_atoms = cfg.n_atoms;
  if (n_atoms < 1 || n_atoms > kOracleMaxAtoms) {
    throw std::invalid_argument("full_product_oracle: N must lie in [1, " +
                                std::to_string(kOracleMaxAtoms) + "]");
  }
  schedule.validate();
  const int dim = 1 << n_atoms;
  const ProductOps ops = build_product_ops(n_atoms);

  // Embed the symmetric input: |D_n> = C(N,n)^{-1/2} sum_{popcount(b) = n} |b>.
  const DickeState start = initial ? *initial : make_css_up(n_atoms);
  if (start.n_atoms() != n_atoms) throw std::invalid_argument("full_product_oracle: N mismatch");
  CVector psi = CVector::Zero(dim);
  for (int b = 0; b < dim; ++b) {
    const int n = ops.up_count[b];
    psi[b] = start[n] / std::sqrt(std::exp(log_binomial(n_atoms, n)));
  }

  for (const auto& step : schedule.steps) {
    if (step.duration == 0.0) continue;
    CMatrix h = step.omega * (std::cos(step.phase) * ops.sx + std::sin(step.phase) * ops.sy);
    if (step.drive && *step.drive != 0.0) {
      BoundaryOptions bo;
      bo.ideal = step.ideal_boundary;
      bo.allow_gain = opts.allow_gain;
      bo.xi_offset = opts.xi_offset;
      const CVector diag = build_boundary(cfg, *step.drive, bo).diag;
      for (int b = 0; b < dim; ++b) h(b, b) += diag[ops.up_count[b]];
    }
    const CMatrix generator = (-kI * step.duration) * h;
    const CMatrix u = generator.exp();
    psi = u * psi;
  }

  CVector out = CVector::Zero(n_atoms + 1);
  for (int b = 0; b < dim; ++b) {
    const int n = ops.up_count[b];
    out[n] += psi[b] / std::sqrt(std::exp(log_binomial(n_atoms, n)));
  }
  return DickeState(n_atoms, std::move(out));
}

}  // namespace entamp
