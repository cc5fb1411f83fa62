#pragma once

#include <cmath>
#include <vector>

#include "dsf/dense.hpp"
#include "dsf/rng.hpp"

namespace test_util {

using dsf::DenseMatrix;
using dsf::Index;
using dsf::Vector;

inline DenseMatrix random_matrix(dsf::RandomStream& rs, Index n, Index m) {
  DenseMatrix w(n, m);
  for (Index i = 0; i < w.size(); ++i) w.data()[i] = rs.normal();
  return w;
}

// Reference product: independent of the library kernels.
inline DenseMatrix naive_matmul(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Index t = 0; t < a.cols(); ++t) s += a(i, t) * b(t, j);
      c(i, j) = s;
    }
  }
  return c;
}

inline DenseMatrix random_psd(dsf::RandomStream& rs, Index n, Index samples = 0) {
  if (samples == 0) samples = n + 4;
  DenseMatrix x = random_matrix(rs, samples, n);
  DenseMatrix m = naive_matmul(DenseMatrix(x.transpose()), x);
  return 0.5 * (m + DenseMatrix(m.transpose()));
}

// Gaussian elimination with partial pivoting; the oracle for small solves.
inline Vector gauss_solve(DenseMatrix a, Vector b) {
  const Index n = a.rows();
  for (Index k = 0; k < n; ++k) {
    Index pivot = k;
    for (Index i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(pivot, k))) pivot = i;
    }
    if (pivot != k) {
      a.row(k).swap(a.row(pivot));
      std::swap(b[k], b[pivot]);
    }
    for (Index i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      a.row(i) -= f * a.row(k);
      b[i] -= f * b[k];
    }
  }
  Vector x = Vector::Zero(n);
  for (Index i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (Index j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

inline double rel_frob_error(const DenseMatrix& a, const DenseMatrix& b) {
  double num = 0.0, den = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    num += d * d;
    den += b.data()[i] * b.data()[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace test_util
