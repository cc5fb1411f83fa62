#pragma once

#include <cstdint>
#include <vector>

#include "dsf/dense.hpp"

namespace dsf {

/// Row-major boolean support pattern.
struct SparsityMask {
  Index rows = 0;
  Index cols = 0;
  std::vector<std::uint8_t> bits;  // rows*cols entries, 0 or 1

  static SparsityMask zeros(Index rows, Index cols);
  static SparsityMask ones(Index rows, Index cols);

  bool at(Index i, Index j) const { return bits[static_cast<size_t>(i * cols + j)] != 0; }
  void set(Index i, Index j, bool v) { bits[static_cast<size_t>(i * cols + j)] = v ? 1 : 0; }
  std::int64_t nnz() const;
};

/// Compressed-row sparse matrix with an explicit nonzero budget. Stored
/// values may include explicit zeros; they count toward nnz, which keeps
/// warm-started masks shape-stable between iterations.
struct SparseFactor {
  Index rows = 0;
  Index cols = 0;
  std::vector<std::int64_t> row_ptr;  // rows+1 offsets, non-decreasing
  std::vector<std::int64_t> col_idx;  // strictly increasing within a row
  std::vector<double> values;
  std::int64_t budget = 0;

  std::int64_t nnz() const { return row_ptr.empty() ? 0 : row_ptr.back(); }
  DenseMatrix to_dense() const;
  SparsityMask support() const;

  /// Throws std::invalid_argument if the CSR structure is inconsistent or
  /// nnz exceeds the budget.
  void validate() const;
};

/// Keeps the entries of `w` selected by `support` (explicit zeros included).
SparseFactor sparse_from_dense(const DenseMatrix& w, const SparsityMask& support,
                               std::int64_t budget);

/// Identity pattern, n nonzeros.
SparseFactor identity_factor(Index n, std::int64_t budget);

SparseFactor transpose_factor(const SparseFactor& a);

/// Multiplies row i of `a` by scale[i].
SparseFactor scale_factor_rows(const SparseFactor& a, const Vector& scale);

/// A product of two sparse factors. When `transposed` is set the pair was
/// built against the transposed target and the represented matrix is (AB)^T.
struct FactorPair {
  SparseFactor A;
  SparseFactor B;
  bool transposed = false;

  /// The represented matrix: AB, or (AB)^T when transposed.
  DenseMatrix product_dense() const;

  /// The representation W ~ left*right in the orientation of the original
  /// target, regardless of the transposed flag.
  std::pair<SparseFactor, SparseFactor> to_left_right() const;
};

}  // namespace dsf
