#include "dsf/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "dsf/admm.hpp"
#include "dsf/numerics.hpp"

namespace dsf {

SparseFactor magnitude_prune(const DenseMatrix& w, std::int64_t z) {
  require(z >= 0 && z <= w.size(), "magnitude_prune: z out of range");
  DenseMatrix scores = w.cwiseAbs();
  SparsityMask mask = topk_mask(scores, z);
  return sparse_from_dense(w, mask, z);
}

std::int64_t rank_for_budget(Index n, Index m, std::int64_t z) {
  require(n > 0 && m > 0 && z >= 0, "rank_for_budget: invalid arguments");
  const std::int64_t k = z / (n + m);
  return std::clamp(k, std::int64_t{0}, static_cast<std::int64_t>(std::min(n, m)));
}

namespace {

// Dense-stored factor: every entry is a structural nonzero.
SparseFactor dense_stored(const DenseMatrix& w, std::int64_t budget) {
  SparseFactor f;
  f.rows = w.rows();
  f.cols = w.cols();
  f.budget = budget;
  f.row_ptr.resize(static_cast<size_t>(f.rows) + 1);
  f.col_idx.resize(static_cast<size_t>(w.size()));
  f.values.resize(static_cast<size_t>(w.size()));
  for (Index i = 0; i <= f.rows; ++i) f.row_ptr[static_cast<size_t>(i)] = i * f.cols;
  for (Index i = 0; i < f.rows; ++i) {
    for (Index j = 0; j < f.cols; ++j) {
      f.col_idx[static_cast<size_t>(i * f.cols + j)] = j;
      f.values[static_cast<size_t>(i * f.cols + j)] = w(i, j);
    }
  }
  f.validate();
  return f;
}

}  // namespace

FactorPair low_rank_project(const DenseMatrix& w, std::int64_t k) {
  const Index n = w.rows(), m = w.cols();
  require(k >= 0 && k <= std::min(n, m), "low_rank_project: k out of range");
  FactorPair pair;
  pair.transposed = false;
  if (k == 0) {
    pair.A = dense_stored(DenseMatrix::Zero(n, 0), 0);
    pair.B = dense_stored(DenseMatrix::Zero(0, m), 0);
    return pair;
  }
  SvdResult dec = svd(w, k);
  DenseMatrix us = dec.U;
  for (std::int64_t c = 0; c < k; ++c) us.col(c) *= dec.singulars[c];
  pair.A = dense_stored(us, n * k);
  pair.B = dense_stored(dec.Vt, k * m);
  return pair;
}

Index monarch_block_count(Index n, double target_density) {
  require(n > 0, "monarch_block_count: n must be positive");
  require(target_density > 0.0, "monarch_block_count: density must be positive");
  const Index root = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
  Index best = 0;
  for (Index b = 1; b <= n; ++b) {
    if (n % b != 0) continue;
    const double density =
        static_cast<double>(b + n / b) / static_cast<double>(n);
    if (density > target_density) continue;
    if (best == 0 || std::llabs(b - root) < std::llabs(best - root) ||
        (std::llabs(b - root) == std::llabs(best - root) && b < best)) {
      best = b;
    }
  }
  require(best != 0, "monarch_block_count: no divisor fits the density target");
  return best;
}

FactorPair monarch_project(const DenseMatrix& w, Index b) {
  const Index n = w.rows();
  require(n > 0 && w.cols() == n, "monarch_project: matrix must be square");
  require(b >= 1 && b <= n && n % b == 0, "monarch_project: block count must divide n");
  const Index p = n / b;

  // Left factor carries u*sqrt(sigma) of every slice, with the inter-block
  // permutation folded into its column indices; the right factor is block
  // diagonal with p x p blocks holding sqrt(sigma)*v^T rows.
  DenseMatrix left = DenseMatrix::Zero(n, n);
  SparsityMask left_mask = SparsityMask::zeros(n, n);
  DenseMatrix right = DenseMatrix::Zero(n, n);
  SparsityMask right_mask = SparsityMask::zeros(n, n);

  DenseMatrix slice(b, p);
  for (Index kb = 0; kb < p; ++kb) {
    for (Index jb = 0; jb < b; ++jb) {
      for (Index i = 0; i < b; ++i)
        for (Index l = 0; l < p; ++l) slice(i, l) = w(kb * b + i, jb * p + l);
      SvdResult dec = svd(slice, 1);
      const double sigma = dec.singulars[0];
      const double root = std::sqrt(sigma);
      for (Index i = 0; i < b; ++i) {
        left(kb * b + i, jb * p + kb) = dec.U(i, 0) * root;
        left_mask.set(kb * b + i, jb * p + kb, true);
      }
      for (Index l = 0; l < p; ++l) {
        right(jb * p + kb, jb * p + l) = root * dec.Vt(0, l);
        right_mask.set(jb * p + kb, jb * p + l, true);
      }
    }
  }

  FactorPair pair;
  pair.A = sparse_from_dense(left, left_mask, n * b);
  pair.B = sparse_from_dense(right, right_mask, n * p);
  pair.transposed = false;
  return pair;
}

}  // namespace dsf
