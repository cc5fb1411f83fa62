#include "dsf/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace dsf {

void require(bool condition, const char* what) {
  if (!condition) throw std::invalid_argument(what);
}

void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw NumericalError(std::string(what) + ": produced non-finite values");
  }
}

namespace {

// c[0..m) += a * b[0..m); plain mul+add per element (no FMA contraction).
inline void axpy(double a, const double* b, double* c, Index m) {
  for (Index j = 0; j < m; ++j) c[j] += a * b[j];
}

double off_diagonal_norm(const DenseMatrix& a) {
  const Index n = a.rows();
  double sum = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  const Index n = a.rows(), k = a.cols(), m = b.cols();
  DenseMatrix c(n, m);
  if (n == 0 || m == 0) return c;
  const double* ad = a.data();
  const double* bd = b.data();
  double* cd = c.data();
  for (Index i = 0; i < n; ++i) {
    double* ci = cd + i * m;
    std::fill(ci, ci + m, 0.0);
    const double* ai = ad + i * k;
    Index t = 0;
    // 4-way unroll over the inner index; the adds into each output element
    // stay sequential in ascending t, matching the naive triple loop exactly.
    for (; t + 4 <= k; t += 4) {
      const double a0 = ai[t + 0], a1 = ai[t + 1], a2 = ai[t + 2], a3 = ai[t + 3];
      const double* b0 = bd + (t + 0) * m;
      const double* b1 = bd + (t + 1) * m;
      const double* b2 = bd + (t + 2) * m;
      const double* b3 = bd + (t + 3) * m;
      for (Index j = 0; j < m; ++j) {
        double v = ci[j];
        v += a0 * b0[j];
        v += a1 * b1[j];
        v += a2 * b2[j];
        v += a3 * b3[j];
        ci[j] = v;
      }
    }
    for (; t < k; ++t) axpy(ai[t], bd + t * m, ci, m);
  }
  require_finite(c, "matmul");
  return c;
}

DenseMatrix gram(const DenseMatrix& x) {
  require(x.rows() > 0 && x.cols() > 0, "gram: empty input");
  DenseMatrix xt = x.transpose();
  DenseMatrix m = matmul(xt, x);
  DenseMatrix g = 0.5 * (m + DenseMatrix(m.transpose()));
  return g;
}

EigenDecomposition sym_eigen(const DenseMatrix& s) {
  require(s.rows() == s.cols() && s.rows() > 0, "sym_eigen: square matrix required");
  const Index n = s.rows();
  const double norm_s = frobenius_norm(s);
  const double asym = frobenius_error(s, DenseMatrix(s.transpose()));
  require(asym <= 1e-8 * std::max(norm_s, 1e-300), "sym_eigen: input is not symmetric");

  DenseMatrix a = 0.5 * (s + DenseMatrix(s.transpose()));
  DenseMatrix q = DenseMatrix::Identity(n, n);

  const double stop = 1e-12 * norm_s;
  const int max_sweeps = 100;
  double off = off_diagonal_norm(a);
  int sweep = 0;
  while (off > stop) {
    if (sweep++ >= max_sweeps) {
      throw NumericalError("sym_eigen: Jacobi iteration did not converge",
                           norm_s > 0.0 ? off / norm_s : off);
    }
    for (Index p = 0; p < n - 1; ++p) {
      for (Index r = p + 1; r < n; ++r) {
        const double apq = a(p, r);
        if (apq == 0.0) continue;
        const double theta = (a(r, r) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Index j = 0; j < n; ++j) {  // rows p and r
          const double vp = a(p, j), vq = a(r, j);
          a(p, j) = c * vp - sn * vq;
          a(r, j) = sn * vp + c * vq;
        }
        for (Index i = 0; i < n; ++i) {  // columns p and r
          const double vp = a(i, p), vq = a(i, r);
          a(i, p) = c * vp - sn * vq;
          a(i, r) = sn * vp + c * vq;
        }
        a(p, r) = 0.0;
        a(r, p) = 0.0;
        for (Index i = 0; i < n; ++i) {  // accumulate the rotation into Q
          const double vp = q(i, p), vq = q(i, r);
          q(i, p) = c * vp - sn * vq;
          q(i, r) = sn * vp + c * vq;
        }
      }
    }
    off = off_diagonal_norm(a);
  }

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](Index i, Index j) { return a(i, i) < a(j, j); });

  EigenDecomposition dec;
  dec.Q.resize(n, n);
  dec.eigvals.resize(n);
  for (Index j = 0; j < n; ++j) {
    dec.eigvals[j] = a(order[static_cast<size_t>(j)], order[static_cast<size_t>(j)]);
    dec.Q.col(j) = q.col(order[static_cast<size_t>(j)]);
  }
  require_finite(dec.Q, "sym_eigen");
  return dec;
}

CholeskyFactor::CholeskyFactor(const DenseMatrix& s, double rho) {
  require(s.rows() == s.cols() && s.rows() > 0, "solve_spd: square matrix required");
  require(rho > 0.0, "solve_spd: rho must be positive");
  const Index n = s.rows();
  DenseMatrix l = DenseMatrix::Zero(n, n);
  const double* sd = s.data();
  double* ld = l.data();
  for (Index j = 0; j < n; ++j) {
    const double* lj = ld + j * n;
    double d = sd[j * n + j] + rho;
    for (Index t = 0; t < j; ++t) d -= lj[t] * lj[t];
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw NumericalError("solve_spd: matrix is not positive definite", d);
    }
    const double diag = std::sqrt(d);
    ld[j * n + j] = diag;
    for (Index i = j + 1; i < n; ++i) {
      const double* li = ld + i * n;
      double v = sd[i * n + j];
      for (Index t = 0; t < j; ++t) v -= li[t] * lj[t];
      ld[i * n + j] = v / diag;
    }
  }
  lower_ = std::move(l);
  upper_ = lower_.transpose();
}

DenseMatrix CholeskyFactor::solve(const DenseMatrix& rhs) const {
  const Index n = lower_.rows();
  require(rhs.rows() == n, "solve_spd: rhs row count mismatch");
  const Index m = rhs.cols();
  DenseMatrix y = rhs;
  if (m == 0) return y;
  double* yd = y.data();
  const double* ld = lower_.data();
  const double* ud = upper_.data();
  for (Index i = 0; i < n; ++i) {  // forward: L v = rhs
    double* yi = yd + i * m;
    const double* li = ld + i * n;
    for (Index t = 0; t < i; ++t) axpy(-li[t], yd + t * m, yi, m);
    const double inv = 1.0 / li[i];
    for (Index j = 0; j < m; ++j) yi[j] *= inv;
  }
  for (Index i = n - 1; i >= 0; --i) {  // backward: L^T y = v
    double* yi = yd + i * m;
    const double* ui = ud + i * n;
    for (Index t = i + 1; t < n; ++t) axpy(-ui[t], yd + t * m, yi, m);
    const double inv = 1.0 / ui[i];
    for (Index j = 0; j < m; ++j) yi[j] *= inv;
  }
  require_finite(y, "solve_spd");
  return y;
}

DenseMatrix solve_spd(const DenseMatrix& s, double rho, const DenseMatrix& rhs) {
  return CholeskyFactor(s, rho).solve(rhs);
}

SvdResult svd(const DenseMatrix& w, Index k) {
  const Index n = w.rows(), m = w.cols();
  require(n > 0 && m > 0, "svd: empty input");
  require(k >= 1 && k <= std::min(n, m), "svd: k out of range");

  // Eigendecompose the smaller-side Gram matrix, then recover the other
  // side's singular vectors by projection.
  const bool left_smaller = n <= m;
  DenseMatrix wt = w.transpose();
  EigenDecomposition dec = left_smaller ? sym_eigen(gram(wt)) : sym_eigen(gram(w));
  const Index d = dec.eigvals.size();

  std::vector<Index> order(static_cast<size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&dec](Index i, Index j) {
    return dec.eigvals[i] > dec.eigvals[j];
  });

  SvdResult res;
  res.U.resize(n, k);
  res.singulars.resize(k);
  res.Vt.resize(k, m);
  for (Index c = 0; c < k; ++c) {
    const Index e = order[static_cast<size_t>(c)];
    const double lam = std::max(dec.eigvals[e], 0.0);
    const double sigma = std::sqrt(lam);
    res.singulars[c] = sigma;
    Vector q = dec.Q.col(e);
    if (left_smaller) {
      Vector v = wt * q;  // W^T u
      const double vn = v.norm();
      if (vn > 0.0) v /= vn; else v.setZero();
      res.U.col(c) = q;
      res.Vt.row(c) = v.transpose();
    } else {
      Vector u = w * q;  // W v
      const double un = u.norm();
      if (un > 0.0) u /= un; else u.setZero();
      res.U.col(c) = u;
      res.Vt.row(c) = q.transpose();
    }
  }
  require_finite(res.U, "svd");
  require_finite(res.Vt, "svd");
  return res;
}

double frobenius_norm(const DenseMatrix& a) {
  const double* p = a.data();
  const Index sz = a.size();
  double sum = 0.0;
  for (Index i = 0; i < sz; ++i) sum += p[i] * p[i];
  return std::sqrt(sum);
}

double frobenius_error(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "frobenius_error: shape mismatch");
  const double* pa = a.data();
  const double* pb = b.data();
  const Index sz = a.size();
  double sum = 0.0;
  for (Index i = 0; i < sz; ++i) {
    const double dlt = pa[i] - pb[i];
    sum += dlt * dlt;
  }
  return std::sqrt(sum);
}

}  // namespace dsf
