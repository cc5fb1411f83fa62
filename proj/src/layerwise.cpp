#include "dsf/layerwise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dsf/rng.hpp"

namespace dsf {

namespace {

constexpr double kNormEps = 1e-12;

Vector floored(const Vector& d) {
  Vector out = d;
  for (Index i = 0; i < out.size(); ++i) out[i] = std::max(out[i], kNormEps);
  return out;
}

}  // namespace

LayerCalibration accumulate_gram(const std::vector<DenseMatrix>& batches) {
  require(!batches.empty(), "accumulate_gram: no batches");
  const Index n = batches.front().cols();
  require(n > 0, "accumulate_gram: batches must have columns");
  LayerCalibration calib;
  calib.G = DenseMatrix::Zero(n, n);
  for (const DenseMatrix& x : batches) {
    require(x.cols() == n, "accumulate_gram: column count mismatch");
    if (x.rows() == 0) continue;
    calib.G += gram(x);
    calib.nsamples += x.rows();
  }
  require(calib.nsamples > 0, "accumulate_gram: no calibration rows");
  calib.feature_norms.resize(n);
  for (Index i = 0; i < n; ++i) calib.feature_norms[i] = std::sqrt(std::max(calib.G(i, i), 0.0));
  return calib;
}

LayerCalibration calibration_from_gram(const DenseMatrix& g, std::int64_t nsamples) {
  require(g.rows() == g.cols() && g.rows() > 0, "calibration: Gram matrix must be square");
  const double asym = frobenius_error(g, DenseMatrix(g.transpose()));
  require(asym <= 1e-8 * std::max(frobenius_norm(g), 1e-300),
          "calibration: Gram matrix is not symmetric");
  LayerCalibration calib;
  calib.G = 0.5 * (g + DenseMatrix(g.transpose()));
  calib.nsamples = nsamples;
  calib.feature_norms.resize(g.rows());
  for (Index i = 0; i < g.rows(); ++i) {
    calib.feature_norms[i] = std::sqrt(std::max(calib.G(i, i), 0.0));
  }
  return calib;
}

double layer_error_dense(const LayerCalibration& calib, const DenseMatrix& w,
                         const DenseMatrix& approx) {
  require(w.rows() == calib.G.rows(), "layer_error: weight rows must match calibration");
  require(w.rows() == approx.rows() && w.cols() == approx.cols(),
          "layer_error: shape mismatch");
  DenseMatrix delta = w - approx;
  DenseMatrix gd = matmul(calib.G, delta);
  const double* a = delta.data();
  const double* b = gd.data();
  double sum = 0.0;
  for (Index i = 0; i < delta.size(); ++i) sum += a[i] * b[i];
  return std::max(sum, 0.0);
}

double layer_error(const LayerCalibration& calib, const DenseMatrix& w,
                   const FactorPair& pair) {
  return layer_error_dense(calib, w, pair.product_dense());
}

DenseMatrix wanda_scale(const DenseMatrix& w, const Vector& d) {
  require(d.size() == w.rows(), "wanda_scale: norm vector length mismatch");
  DenseMatrix ws = w;
  for (Index i = 0; i < w.rows(); ++i) ws.row(i) *= std::max(d[i], kNormEps);
  return ws;
}

SparseFactor finalize_B(const LayerCalibration& calib, const DenseMatrix& w,
                        const SparseFactor& a, const SparsityMask& mask_b, std::int64_t iters,
                        const std::optional<DenseMatrix>& warm_b) {
  require(a.rows == w.rows(), "finalize_B: left factor rows must match W");
  require(mask_b.rows == a.cols && mask_b.cols == w.cols(), "finalize_B: mask shape mismatch");
  require(iters >= 1, "finalize_B: iters must be >= 1");
  const Index k = a.cols;

  // Reduction of min ||X(W - A B)||^2 over B to normal-equation form with
  // design X A: Gram A^T G A, target A^T G W.
  DenseMatrix ad = a.to_dense();
  DenseMatrix adt = ad.transpose();
  DenseMatrix ga = matmul(calib.G, ad);
  DenseMatrix gb = matmul(adt, ga);
  gb = 0.5 * (gb + DenseMatrix(gb.transpose()));
  DenseMatrix tb = matmul(adt, matmul(calib.G, w));

  DenseMatrix z0 = warm_b.has_value() ? *warm_b : DenseMatrix::Zero(k, w.cols());
  require(z0.rows() == k && z0.cols() == w.cols(), "finalize_B: warm start shape mismatch");

  Preconditioned pre = precondition(gb, z0);
  SparseRegressionProblem prob;
  prob.G = std::move(pre.G);
  prob.T = tb;
  for (Index i = 0; i < k; ++i) prob.T.row(i) /= pre.d[i];
  prob.W_ref = pre.W;
  AdmmState warm{pre.W, DenseMatrix::Zero(k, w.cols()), 1.0};

  AdmmResult res = admm_fixed_mask(prob, mask_b, iters, warm, 1.0);
  DenseMatrix bnew = res.Wp;
  for (Index i = 0; i < k; ++i) bnew.row(i) /= pre.d[i];
  return sparse_from_dense(bnew, mask_b, std::max(mask_b.nnz(), std::int64_t{0}));
}

DenseMatrix sylvester_solve(const EigenDecomposition& g_eig,
                            const EigenDecomposition& bbt_eig, const DenseMatrix& rhs,
                            double rho) {
  const Index n = g_eig.Q.rows();
  const Index k = bbt_eig.Q.rows();
  require(rhs.rows() == n && rhs.cols() == k, "sylvester_solve: rhs shape mismatch");
  require(rho > 0.0, "sylvester_solve: rho must be positive");

  DenseMatrix qt = g_eig.Q.transpose();
  DenseMatrix m = matmul(matmul(qt, rhs), bbt_eig.Q);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) {
      const double denom = g_eig.eigvals[i] * bbt_eig.eigvals[j] + rho;
      if (!(denom > 0.0)) {
        throw NumericalError("sylvester_solve: non-positive pivot", denom);
      }
      m(i, j) /= denom;
    }
  }
  DenseMatrix rt = bbt_eig.Q.transpose();
  DenseMatrix out = matmul(matmul(g_eig.Q, m), rt);
  require_finite(out, "sylvester_solve");
  return out;
}

SparseFactor optimize_A(const LayerCalibration& calib, const DenseMatrix& w,
                        const SparseFactor& b, const SparsityMask& mask_a, std::int64_t iters,
                        double rho, const std::optional<DenseMatrix>& warm_a) {
  require(b.cols == w.cols(), "optimize_A: right factor columns must match W");
  require(mask_a.rows == w.rows() && mask_a.cols == b.rows, "optimize_A: mask shape mismatch");
  require(iters >= 1, "optimize_A: iters must be >= 1");
  const Index n = w.rows();
  const Index k = b.rows;

  DenseMatrix bd = b.to_dense();
  DenseMatrix bdt = bd.transpose();
  EigenDecomposition g_eig = sym_eigen(calib.G);
  EigenDecomposition bbt_eig = sym_eigen(gram(bdt));
  DenseMatrix rhs0 = matmul(matmul(calib.G, w), bdt);

  DenseMatrix z = DenseMatrix::Zero(n, k);
  DenseMatrix u = DenseMatrix::Zero(n, k);
  if (warm_a.has_value()) {
    require(warm_a->rows() == n && warm_a->cols() == k, "optimize_A: warm start shape mismatch");
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < k; ++j) z(i, j) = mask_a.at(i, j) ? (*warm_a)(i, j) : 0.0;
  }

  for (std::int64_t t = 1; t <= iters; ++t) {
    DenseMatrix w_hat = sylvester_solve(g_eig, bbt_eig, rhs0 + rho * (z - u), rho);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < k; ++j) {
        const double v = w_hat(i, j) + u(i, j);
        z(i, j) = mask_a.at(i, j) ? v : 0.0;
        u(i, j) += w_hat(i, j) - z(i, j);
      }
    }
  }
  return sparse_from_dense(z, mask_a, std::max(mask_a.nnz(), std::int64_t{0}));
}

SparsityMask random_shared_mask(std::uint64_t seed, Index n, std::int64_t z_a) {
  require(n > 0, "random_shared_mask: n must be positive");
  const std::int64_t total = n * n;
  require(z_a >= 0 && z_a <= total, "random_shared_mask: z_a out of range");
  SparsityMask mask = SparsityMask::zeros(n, n);
  if (z_a == 0) return mask;
  std::vector<std::int64_t> idx(static_cast<size_t>(total));
  std::iota(idx.begin(), idx.end(), std::int64_t{0});
  RandomStream rs(seed);
  for (std::int64_t i = 0; i < z_a; ++i) {  // partial Fisher-Yates
    const std::int64_t j =
        i + static_cast<std::int64_t>(rs.next_below(static_cast<std::uint64_t>(total - i)));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    mask.bits[static_cast<size_t>(idx[static_cast<size_t>(i)])] = 1;
  }
  return mask;
}

PruneResult prune_layer(const DenseMatrix& w, const LayerCalibration& calib,
                        std::int64_t z_total, const SplitRule& rule, const DsfConfig& cfg,
                        const PruneOptions& opts) {
  require(w.rows() == calib.G.rows(), "prune_layer: weight rows must match calibration");
  const Index n = w.rows(), m = w.cols();
  const Index n_sq = std::min(n, m);
  const BudgetSplit split = split_budget(n, m, z_total, rule);

  const Vector d = floored(calib.feature_norms);
  const DenseMatrix target = opts.wanda ? wanda_scale(w, calib.feature_norms) : w;

  FactorPair projected;
  if (opts.fixed_a_mask_seed.has_value()) {
    const SparsityMask mask = random_shared_mask(*opts.fixed_a_mask_seed, n_sq, split.z_a);
    projected = dsf_project_fixed_mask(target, split, cfg, mask);
  } else {
    projected = dsf_project(target, split, cfg);
  }

  auto [left, right] = projected.to_left_right();
  const std::int64_t left_budget = left.budget;
  const std::int64_t right_budget = right.budget;

  if (opts.wanda) {
    Vector inv(n);
    for (Index i = 0; i < n; ++i) inv[i] = 1.0 / d[i];
    left = scale_factor_rows(left, inv);
  }
  if (opts.finalize) {
    right = finalize_B(calib, w, left, right.support(), opts.finalize_iters, right.to_dense());
    right.budget = right_budget;
  }
  if (opts.optimize_a) {
    left = optimize_A(calib, w, right, left.support(), opts.optimize_a_iters,
                      opts.optimize_a_rho, left.to_dense());
    left.budget = left_budget;
  }

  PruneResult res;
  res.pair = FactorPair{std::move(left), std::move(right), false};
  res.error = layer_error(calib, w, res.pair);
  return res;
}

}  // namespace dsf
