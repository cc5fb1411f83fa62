#pragma once

#include <cstdint>
#include <optional>

#include "dsf/factorization.hpp"
#include "dsf/numerics.hpp"
#include "dsf/sparse.hpp"

namespace dsf {

/// Sufficient statistics of the calibration input: G = X^T X, the per-input
/// feature norms sqrt(diag(G)) and the number of calibration rows. All
/// layer-wise objectives are functions of these, so raw X is never stored.
struct LayerCalibration {
  DenseMatrix G;
  Vector feature_norms;
  std::int64_t nsamples = 0;
};

/// Accumulates X_b^T X_b over the batches in order.
LayerCalibration accumulate_gram(const std::vector<DenseMatrix>& batches);

/// Wraps a precomputed Gram matrix.
LayerCalibration calibration_from_gram(const DenseMatrix& g, std::int64_t nsamples = 0);

/// tr(D^T G D) with D = W - AB; equals ||XW - XAB||^2 exactly. Tiny negative
/// round-off is clamped to zero.
double layer_error(const LayerCalibration& calib, const DenseMatrix& w, const FactorPair& pair);
double layer_error_dense(const LayerCalibration& calib, const DenseMatrix& w,
                         const DenseMatrix& approx);

/// Scales row i of W by max(d_i, 1e-12). The inverse transform divides the
/// rows of the left factor, so the represented product approximates W again.
DenseMatrix wanda_scale(const DenseMatrix& w, const Vector& d);

/// Re-solves the right factor against the true layer-wise objective with all
/// masks frozen: fixed-mask ADMM on Gram A^T G A and target A^T G W. An
/// optional warm start (typically the current right factor) speeds up and
/// stabilizes convergence.
SparseFactor finalize_B(const LayerCalibration& calib, const DenseMatrix& w,
                        const SparseFactor& a, const SparsityMask& mask_b, std::int64_t iters,
                        const std::optional<DenseMatrix>& warm_b = std::nullopt);

/// Solves G*A*BBt + rho*A = RHS through the two eigendecompositions:
/// A = Q (Q^T RHS R ./ (d e^T + rho)) R^T.
DenseMatrix sylvester_solve(const EigenDecomposition& g_eig,
                            const EigenDecomposition& bbt_eig, const DenseMatrix& rhs,
                            double rho);

/// ADMM refinement of the left factor under a frozen mask, built on
/// sylvester_solve. Off by default in the pipeline; mostly useful when the
/// calibration Gram is far from diagonal.
SparseFactor optimize_A(const LayerCalibration& calib, const DenseMatrix& w,
                        const SparseFactor& b, const SparsityMask& mask_a, std::int64_t iters,
                        double rho, const std::optional<DenseMatrix>& warm_a = std::nullopt);

/// Uniformly random z_a-subset of the n*n positions, reproducible per seed.
SparsityMask random_shared_mask(std::uint64_t seed, Index n, std::int64_t z_a);

struct PruneOptions {
  bool wanda = true;
  bool finalize = true;
  bool optimize_a = false;
  std::optional<std::uint64_t> fixed_a_mask_seed;
  std::int64_t finalize_iters = 30;
  std::int64_t optimize_a_iters = 30;
  double optimize_a_rho = 1.0;
};

struct PruneResult {
  FactorPair pair;  // left * right in the orientation of W
  double error = 0.0;
};

/// Layer-wise pruning pipeline: optional Wanda scaling, sparse projection
/// (optionally with a frozen square-factor mask), un-scaling, optional
/// finalization of the right factor and optional refinement of the left one.
PruneResult prune_layer(const DenseMatrix& w, const LayerCalibration& calib,
                        std::int64_t z_total, const SplitRule& rule, const DsfConfig& cfg,
                        const PruneOptions& opts);

}  // namespace dsf
