#include "dsf/factorization.hpp"

#include <algorithm>
#include <cmath>

#include "dsf/baselines.hpp"
#include "dsf/numerics.hpp"

namespace dsf {

namespace {

std::int64_t round_count(double x) {
  return static_cast<std::int64_t>(x >= 0.0 ? std::floor(x + 0.5) : std::ceil(x - 0.5));
}

SparsityMask transpose_mask(const SparsityMask& m) {
  SparsityMask t = SparsityMask::zeros(m.cols, m.rows);
  for (Index i = 0; i < m.rows; ++i)
    for (Index j = 0; j < m.cols; ++j)
      if (m.at(i, j)) t.set(j, i, true);
  return t;
}

// Budget available to a factor at outer step k when the config ramps budgets
// across outer iterations; constant mode keeps the final budget throughout.
std::int64_t budget_at(std::int64_t k, const Schedule& sched, std::int64_t z_final,
                       std::int64_t capacity) {
  if (sched.mode == ScheduleMode::kConstant || capacity == 0 || z_final == capacity) {
    return z_final;
  }
  Schedule s = sched;
  s.final_density = static_cast<double>(z_final) / static_cast<double>(capacity);
  if (s.final_density <= 0.0) return z_final;
  const std::int64_t step = std::min(k, s.total_steps);
  const double density = cubic_density(step, s);
  return std::clamp(round_count(density * static_cast<double>(capacity)), z_final, capacity);
}

// Warm-startable state of one factor's subproblem, kept in unscaled
// coordinates so it survives the re-preconditioning of later outer steps.
struct InnerState {
  DenseMatrix Z;
  DenseMatrix U;
};

// One alternation step: min ||design * X - Y|| with ||X||_0 <= z, given the
// design Gram g and t = design^T Y. The problem is preconditioned to unit
// Gram diagonal; warm state and result are scaled in and out accordingly.
DenseMatrix inner_solve(const DenseMatrix& g, const DenseMatrix& t, std::int64_t z,
                        const SparsityMask* fixed_mask, std::int64_t iters, double rho0,
                        InnerState& state, SparsityMask& mask_out) {
  const Index n = t.rows(), m = t.cols();
  if (z == 0 && fixed_mask == nullptr) {
    state.Z.setZero();
    state.U.setZero();
    mask_out = SparsityMask::zeros(n, m);
    return DenseMatrix::Zero(n, m);
  }

  Preconditioned pre = precondition(g, state.Z);
  SparseRegressionProblem prob;
  prob.G = std::move(pre.G);
  prob.T = t;
  for (Index i = 0; i < n; ++i) prob.T.row(i) /= pre.d[i];
  prob.W_ref = pre.W;

  AdmmState warm;
  warm.Z = std::move(pre.W);
  warm.U = state.U;
  for (Index i = 0; i < n; ++i) warm.U.row(i) *= pre.d[i];

  AdmmResult res;
  if (fixed_mask != nullptr) {
    res = admm_fixed_mask(prob, *fixed_mask, iters, warm, rho0);
  } else {
    Schedule sched;
    sched.mode = ScheduleMode::kConstant;
    sched.total_steps = iters;
    sched.final_density = static_cast<double>(z) / static_cast<double>(n * m);
    res = admm_search_mask(prob, z, iters, sched, warm, rho0);
  }

  state.Z = res.state.Z;
  state.U = res.state.U;
  for (Index i = 0; i < n; ++i) {
    state.Z.row(i) /= pre.d[i];
    state.U.row(i) /= pre.d[i];
  }
  mask_out = res.mask;
  return state.Z;
}

FactorPair dsf_project_impl(const DenseMatrix& w_in, const BudgetSplit& split,
                            const DsfConfig& cfg, const SparsityMask* fixed_mask_a,
                            DsfTrace* trace) {
  require(w_in.rows() > 0 && w_in.cols() > 0, "dsf_project: empty input");
  require(cfg.outer >= 1 && cfg.inner >= 1, "dsf_project: iteration counts must be >= 1");

  const bool transposed = w_in.rows() > w_in.cols();
  const DenseMatrix w = transposed ? DenseMatrix(w_in.transpose()) : w_in;
  const Index n = w.rows(), m = w.cols();

  DsfInit init = init_factors(w, split);
  DenseMatrix a = init.pair.A.to_dense();
  DenseMatrix b = init.pair.B.to_dense();
  SparsityMask mask_a = init.pair.A.support();
  SparsityMask mask_b = init.pair.B.support();

  InnerState sb{init.state_b.Z, init.state_b.U};
  // The A subproblem is solved in transposed coordinates (for A^T).
  InnerState sa{DenseMatrix(init.state_a.Z.transpose()),
                DenseMatrix(init.state_a.U.transpose())};
  SparsityMask fixed_at;
  if (fixed_mask_a != nullptr) {
    require(fixed_mask_a->rows == n && fixed_mask_a->cols == n,
            "dsf_project: fixed A mask shape mismatch");
    fixed_at = transpose_mask(*fixed_mask_a);
  }

  const DenseMatrix wt = w.transpose();
  for (std::int64_t k = 1; k <= cfg.outer; ++k) {
    const double rho0 = cfg.anneal ? anneal_rho0(k, cfg.outer) : 1.0;

    // B step: design A, target W.
    const std::int64_t zb_k = budget_at(k, cfg.schedule, split.z_b, n * m);
    DenseMatrix at = a.transpose();
    b = inner_solve(gram(a), matmul(at, w), zb_k, nullptr, cfg.inner, rho0, sb, mask_b);

    // A step via ||AB - W|| = ||B^T A^T - W^T||: design B^T, unknown A^T.
    const std::int64_t za_k = budget_at(k, cfg.schedule, split.z_a, n * n);
    DenseMatrix bt = b.transpose();
    DenseMatrix atp = inner_solve(gram(bt), matmul(b, wt), za_k,
                                  fixed_mask_a != nullptr ? &fixed_at : nullptr, cfg.inner,
                                  rho0, sa, mask_a);
    a = atp.transpose();
    mask_a = transpose_mask(mask_a);

    if (trace != nullptr) {
      trace->objective.push_back(frobenius_error(matmul(a, b), w));
      trace->nnz_a.push_back(mask_a.nnz());
      trace->nnz_b.push_back(mask_b.nnz());
    }
  }

  FactorPair pair;
  pair.A = sparse_from_dense(a, mask_a, split.z_a);
  pair.B = sparse_from_dense(b, mask_b, split.z_b);
  pair.transposed = transposed;
  return pair;
}

}  // namespace

BudgetSplit split_budget(Index rows, Index cols, std::int64_t z_total, const SplitRule& rule) {
  require(rows > 0 && cols > 0, "split_budget: empty matrix");
  const std::int64_t n = std::min(rows, cols);
  const std::int64_t m = std::max(rows, cols);
  require(z_total >= n, "split_budget: budget below the identity-factor minimum");
  require(z_total <= n * n + n * m, "split_budget: budget exceeds factor capacity");

  std::int64_t z_a = 0;
  switch (rule.policy) {
    case SplitPolicy::kThirdSplit:
      z_a = round_count(static_cast<double>(z_total) / 3.0);
      break;
    case SplitPolicy::kFixedDensity:
      require(rule.param > 0.0 && rule.param <= 1.0, "split_budget: density out of (0,1]");
      z_a = round_count(rule.param * static_cast<double>(n) * static_cast<double>(n));
      break;
    case SplitPolicy::kObcRule:
      require(rule.param > 0.0 && rule.param <= 1.0, "split_budget: sparsity out of (0,1]");
      z_a = round_count(std::max(0.16, rule.param / 2.0) * static_cast<double>(n) *
                        static_cast<double>(n));
      break;
  }
  z_a = std::min(z_a, n * n);
  const std::int64_t z_b = z_total - z_a;
  require(z_b > 0, "split_budget: no budget left for the second factor");
  require(z_b <= n * m, "split_budget: second factor budget exceeds capacity");
  return BudgetSplit{z_a, z_b};
}

double anneal_rho0(std::int64_t k, std::int64_t n_outer) {
  require(k >= 1 && k <= n_outer, "anneal_rho0: step out of range");
  if (n_outer <= 3) return 1.0;
  const double r =
      std::min(1.0, static_cast<double>(k) / static_cast<double>(n_outer - 3));
  return r * r * r;
}

DsfInit init_factors(const DenseMatrix& w, const BudgetSplit& split) {
  require(w.rows() > 0 && w.cols() > 0, "init_factors: empty input");
  require(w.rows() <= w.cols(), "init_factors: expects rows <= cols");
  const Index n = w.rows(), m = w.cols();
  require(split.z_a >= n, "init_factors: z_a cannot hold the identity factor");
  require(split.z_a <= n * n, "init_factors: z_a exceeds capacity");
  require(split.z_b >= 0 && split.z_b <= n * m, "init_factors: z_b out of range");

  DsfInit init;
  init.pair.A = identity_factor(n, split.z_a);
  init.pair.B = magnitude_prune(w, split.z_b);
  init.pair.B.budget = split.z_b;
  init.pair.transposed = false;
  init.state_a = AdmmState{init.pair.A.to_dense(), DenseMatrix::Zero(n, n), 1.0};
  init.state_b = AdmmState{init.pair.B.to_dense(), DenseMatrix::Zero(n, m), 1.0};
  return init;
}

FactorPair dsf_project(const DenseMatrix& w, const BudgetSplit& split, const DsfConfig& cfg,
                       DsfTrace* trace) {
  return dsf_project_impl(w, split, cfg, nullptr, trace);
}

FactorPair dsf_project_fixed_mask(const DenseMatrix& w, const BudgetSplit& split,
                                  const DsfConfig& cfg, const SparsityMask& mask_a,
                                  DsfTrace* trace) {
  return dsf_project_impl(w, split, cfg, &mask_a, trace);
}

}  // namespace dsf
