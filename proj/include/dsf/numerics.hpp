#pragma once

#include "dsf/dense.hpp"

namespace dsf {

/// Eigendecomposition of a symmetric matrix: S = Q diag(eigvals) Q^T with
/// orthonormal Q and eigenvalues in ascending order.
struct EigenDecomposition {
  DenseMatrix Q;
  Vector eigvals;
};

/// Truncated SVD: W ~ U diag(singulars) Vt with orthonormal U columns and
/// Vt rows, singular values descending and non-negative.
struct SvdResult {
  DenseMatrix U;
  Vector singulars;
  DenseMatrix Vt;
};

/// Dense product A*B. Each output element accumulates its terms in ascending
/// inner index order, so results are bit-identical to the naive triple loop.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// Gram matrix X^T X, symmetrized exactly as 0.5*(M + M^T).
DenseMatrix gram(const DenseMatrix& x);

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. The input is
/// symmetrized internally; relative asymmetry beyond 1e-8 is rejected.
/// Throws NumericalError if the off-diagonal norm has not dropped below
/// 1e-12*||S||_F after 100 sweeps.
EigenDecomposition sym_eigen(const DenseMatrix& s);

/// Cholesky factorization of S + rho*I, reusable across multiple solves.
class CholeskyFactor {
 public:
  CholeskyFactor(const DenseMatrix& s, double rho);

  /// Solves (S + rho*I) Y = rhs for all columns of rhs.
  DenseMatrix solve(const DenseMatrix& rhs) const;

  Index size() const { return lower_.rows(); }

 private:
  DenseMatrix lower_;
  DenseMatrix upper_;  // lower_^T, kept for cache-friendly back substitution
};

/// Solves (S + rho*I) Y = rhs for symmetric positive semi-definite S, rho > 0.
DenseMatrix solve_spd(const DenseMatrix& s, double rho, const DenseMatrix& rhs);

/// Top-k singular triplets, computed through sym_eigen on the smaller-side
/// Gram matrix. Ties between equal singular values are resolved by ascending
/// eigen index, which makes the selection deterministic.
SvdResult svd(const DenseMatrix& w, Index k);

double frobenius_norm(const DenseMatrix& a);

/// ||A - B||_F for equal-shape matrices.
double frobenius_error(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace dsf
