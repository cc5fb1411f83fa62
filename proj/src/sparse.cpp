#include "dsf/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "dsf/numerics.hpp"

namespace dsf {

SparsityMask SparsityMask::zeros(Index rows, Index cols) {
  SparsityMask m;
  m.rows = rows;
  m.cols = cols;
  m.bits.assign(static_cast<size_t>(rows * cols), 0);
  return m;
}

SparsityMask SparsityMask::ones(Index rows, Index cols) {
  SparsityMask m = zeros(rows, cols);
  std::fill(m.bits.begin(), m.bits.end(), std::uint8_t{1});
  return m;
}

std::int64_t SparsityMask::nnz() const {
  std::int64_t count = 0;
  for (std::uint8_t b : bits) count += b != 0;
  return count;
}

DenseMatrix SparseFactor::to_dense() const {
  DenseMatrix w = DenseMatrix::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (std::int64_t p = row_ptr[static_cast<size_t>(i)];
         p < row_ptr[static_cast<size_t>(i) + 1]; ++p) {
      w(i, static_cast<Index>(col_idx[static_cast<size_t>(p)])) =
          values[static_cast<size_t>(p)];
    }
  }
  return w;
}

SparsityMask SparseFactor::support() const {
  SparsityMask m = SparsityMask::zeros(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (std::int64_t p = row_ptr[static_cast<size_t>(i)];
         p < row_ptr[static_cast<size_t>(i) + 1]; ++p) {
      m.set(i, static_cast<Index>(col_idx[static_cast<size_t>(p)]), true);
    }
  }
  return m;
}

void SparseFactor::validate() const {
  require(rows >= 0 && cols >= 0, "sparse: negative dimensions");
  require(row_ptr.size() == static_cast<size_t>(rows) + 1, "sparse: row_ptr length mismatch");
  require(row_ptr.front() == 0, "sparse: row_ptr must start at 0");
  for (size_t i = 0; i + 1 < row_ptr.size(); ++i) {
    require(row_ptr[i] <= row_ptr[i + 1], "sparse: row_ptr must be non-decreasing");
  }
  const std::int64_t n = row_ptr.back();
  require(col_idx.size() == static_cast<size_t>(n), "sparse: col_idx length mismatch");
  require(values.size() == static_cast<size_t>(n), "sparse: values length mismatch");
  for (Index i = 0; i < rows; ++i) {
    std::int64_t prev = -1;
    for (std::int64_t p = row_ptr[static_cast<size_t>(i)];
         p < row_ptr[static_cast<size_t>(i) + 1]; ++p) {
      const std::int64_t c = col_idx[static_cast<size_t>(p)];
      require(c > prev && c < cols, "sparse: column indices must strictly increase within a row");
      require(std::isfinite(values[static_cast<size_t>(p)]), "sparse: non-finite value");
      prev = c;
    }
  }
  require(n <= budget, "sparse: nnz exceeds budget");
}

SparseFactor sparse_from_dense(const DenseMatrix& w, const SparsityMask& support,
                               std::int64_t budget) {
  require(w.rows() == support.rows && w.cols() == support.cols,
          "sparse_from_dense: mask shape mismatch");
  SparseFactor f;
  f.rows = w.rows();
  f.cols = w.cols();
  f.budget = budget;
  f.row_ptr.assign(static_cast<size_t>(f.rows) + 1, 0);
  const std::int64_t n = support.nnz();
  f.col_idx.reserve(static_cast<size_t>(n));
  f.values.reserve(static_cast<size_t>(n));
  for (Index i = 0; i < f.rows; ++i) {
    for (Index j = 0; j < f.cols; ++j) {
      if (support.at(i, j)) {
        f.col_idx.push_back(j);
        f.values.push_back(w(i, j));
      }
    }
    f.row_ptr[static_cast<size_t>(i) + 1] = static_cast<std::int64_t>(f.col_idx.size());
  }
  f.validate();
  return f;
}

SparseFactor identity_factor(Index n, std::int64_t budget) {
  SparseFactor f;
  f.rows = n;
  f.cols = n;
  f.budget = budget;
  f.row_ptr.resize(static_cast<size_t>(n) + 1);
  f.col_idx.resize(static_cast<size_t>(n));
  f.values.assign(static_cast<size_t>(n), 1.0);
  for (Index i = 0; i <= n; ++i) f.row_ptr[static_cast<size_t>(i)] = i;
  for (Index i = 0; i < n; ++i) f.col_idx[static_cast<size_t>(i)] = i;
  f.validate();
  return f;
}

SparseFactor transpose_factor(const SparseFactor& a) {
  SparseFactor t;
  t.rows = a.cols;
  t.cols = a.rows;
  t.budget = a.budget;
  const std::int64_t n = a.nnz();
  t.row_ptr.assign(static_cast<size_t>(t.rows) + 1, 0);
  t.col_idx.resize(static_cast<size_t>(n));
  t.values.resize(static_cast<size_t>(n));
  for (std::int64_t p = 0; p < n; ++p) {
    ++t.row_ptr[static_cast<size_t>(a.col_idx[static_cast<size_t>(p)]) + 1];
  }
  for (size_t i = 1; i < t.row_ptr.size(); ++i) t.row_ptr[i] += t.row_ptr[i - 1];
  std::vector<std::int64_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (Index i = 0; i < a.rows; ++i) {
    for (std::int64_t p = a.row_ptr[static_cast<size_t>(i)];
         p < a.row_ptr[static_cast<size_t>(i) + 1]; ++p) {
      const std::int64_t c = a.col_idx[static_cast<size_t>(p)];
      const std::int64_t slot = next[static_cast<size_t>(c)]++;
      t.col_idx[static_cast<size_t>(slot)] = i;
      t.values[static_cast<size_t>(slot)] = a.values[static_cast<size_t>(p)];
    }
  }
  t.validate();
  return t;
}

SparseFactor scale_factor_rows(const SparseFactor& a, const Vector& scale) {
  require(scale.size() == a.rows, "scale_factor_rows: scale length mismatch");
  SparseFactor out = a;
  for (Index i = 0; i < a.rows; ++i) {
    for (std::int64_t p = a.row_ptr[static_cast<size_t>(i)];
         p < a.row_ptr[static_cast<size_t>(i) + 1]; ++p) {
      out.values[static_cast<size_t>(p)] *= scale[i];
    }
  }
  return out;
}

DenseMatrix FactorPair::product_dense() const {
  DenseMatrix p = matmul(A.to_dense(), B.to_dense());
  if (transposed) return p.transpose();
  return p;
}

std::pair<SparseFactor, SparseFactor> FactorPair::to_left_right() const {
  if (!transposed) return {A, B};
  return {transpose_factor(B), transpose_factor(A)};
}

}  // namespace dsf
