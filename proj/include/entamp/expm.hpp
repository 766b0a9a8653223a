#pragma once

// Action of exp(-i H t) on a vector for tridiagonal (collective rotation plus
// diagonal boundary) generators. The dense exponential is never formed.
//
// Two propagators are available. The Krylov one is a restarted Arnoldi scheme
// with a posteriori local error control and accepts any generator. The
// Chebyshev one needs a Hermitian off-diagonal part (any complex diagonal is
// fine) and uses an a priori bound: the numerical range lies in a rectangle,
// the rectangle in a Bernstein ellipse, and the truncated series error on that
// ellipse times the Crouzeix-Palencia constant bounds the operator error.
// It is several times cheaper for the long drive steps of large ensembles.

#include <vector>

#include "entamp/dicke.hpp"

namespace entamp {

class TridiagonalGenerator {
 public:
  // lower[k] = H(k+1, k), upper[k] = H(k, k+1); both of length dim - 1.
  TridiagonalGenerator(CVector diag, CVector lower, CVector upper);

  // Omega * (S_x cos(phase) + S_y sin(phase)) for an N-atom ensemble.
  static TridiagonalGenerator rotation(int n_atoms, double omega, double phase);

  TridiagonalGenerator& add_diagonal(const CVector& d);

  int dim() const { return static_cast<int>(diag_.size()); }
  const CVector& diag() const { return diag_; }
  const CVector& lower() const { return lower_; }
  const CVector& upper() const { return upper_; }

  // out = H * in
  void apply(const cplx* in, cplx* out) const;
  double norm_inf() const;
  bool is_hermitian(double tol = 0.0) const;
  // lower == conj(upper) up to tol; the diagonal may be complex.
  bool has_hermitian_offdiagonal(double tol = 0.0) const;
  bool all_finite() const;
  CMatrix dense() const;

 private:
  CVector diag_, lower_, upper_;
};

enum class ExpmMethod { automatic, krylov, chebyshev };

struct ExpmOptions {
  double tol = 1e-10;   // relative accuracy target, allowed range [1e-14, 1e-6]
  int krylov_dim = 30;  // Arnoldi basis size per substep
  // automatic picks Chebyshev whenever lower == conj(upper).
  ExpmMethod method = ExpmMethod::automatic;
};

struct ExpmStats {
  int substeps = 0;  // Krylov substeps or Chebyshev time slices
  int rejections = 0;
  long matvecs = 0;
  double error_estimate = 0.0;
};

// exp(-i H t) v.
CVector expm_apply(const TridiagonalGenerator& h, double t, const CVector& v,
                   const ExpmOptions& opts = {}, ExpmStats* stats = nullptr);

DickeState expm_apply(const TridiagonalGenerator& h, double t, const DickeState& state,
                      double tol = 1e-10);

// J_0(x) .. J_kmax(x) by Miller's backward recurrence, x >= 0.
std::vector<double> bessel_j_sequence(double x, int kmax);

// Dense exp(A) by scaling and squaring with a diagonal (6,6) Pade approximant.
// Used on the small Krylov Hessenberg matrices.
CMatrix expm_pade(const CMatrix& a);

}  // namespace entamp
