#pragma once

#include <cstdint>

#include "dsf/sparse.hpp"

namespace dsf {

/// Keeps the z largest-magnitude entries of W (ties by row-major index).
/// This is the optimal Frobenius projection onto the z-nonzero set.
SparseFactor magnitude_prune(const DenseMatrix& w, std::int64_t z);

/// Largest rank whose factors U*diag(s) (n x k) and Vt (k x m) fit in z
/// stored values: floor(z / (n + m)), clamped to [0, min(n, m)].
std::int64_t rank_for_budget(Index n, Index m, std::int64_t z);

/// Rank-k truncated SVD as a factor pair; the left factor absorbs the
/// singular values. Reconstruction error equals the discarded singular
/// energy (Eckart-Young).
FactorPair low_rank_project(const DenseMatrix& w, std::int64_t k);

/// Default Monarch block count: round(sqrt(n)) snapped to the nearest
/// divisor of n whose structural density (b + n/b)/n stays at or below
/// `target_density`.
Index monarch_block_count(Index n, double target_density);

/// Monarch projection of a square matrix with b | n: every b x (n/b)
/// interleaved slice is replaced by its best rank-1 approximation. Returns
/// two block-structured factors (the permutation is folded into the first
/// factor's column indices) with n*b + n*(n/b) structural nonzeros.
FactorPair monarch_project(const DenseMatrix& w, Index b);

}  // namespace dsf
