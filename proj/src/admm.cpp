#include "dsf/admm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dsf/numerics.hpp"

namespace dsf {

namespace {

constexpr double kDiagEps = 1e-12;

// Deterministic round-half-away-from-zero to an integer count.
std::int64_t round_count(double x) {
  return static_cast<std::int64_t>(x >= 0.0 ? std::floor(x + 0.5) : std::ceil(x - 0.5));
}

void apply_mask(const SparsityMask& mask, const DenseMatrix& v, DenseMatrix& z) {
  const Index sz = v.size();
  const double* vd = v.data();
  double* zd = z.data();
  for (Index i = 0; i < sz; ++i) zd[i] = mask.bits[static_cast<size_t>(i)] ? vd[i] : 0.0;
}

}  // namespace

double cubic_density(std::int64_t t, const Schedule& sched) {
  require(sched.total_steps >= 1, "schedule: total_steps must be >= 1");
  require(sched.final_density > 0.0 && sched.final_density <= 1.0,
          "schedule: final_density out of (0,1]");
  require(t >= 0 && t <= sched.total_steps, "cubic_density: step out of range");
  if (t == 0) return 1.0;
  if (sched.mode == ScheduleMode::kConstant) return sched.final_density;
  const double sf = 1.0 - sched.final_density;
  const double frac = 1.0 - static_cast<double>(t) / static_cast<double>(sched.total_steps);
  const double pruned = sf * (1.0 - frac * frac * frac);
  return 1.0 - pruned;
}

Preconditioned precondition(const DenseMatrix& g, const DenseMatrix& w) {
  require(g.rows() == g.cols(), "precondition: Gram matrix must be square");
  require(w.rows() == g.rows(), "precondition: row count mismatch");
  const Index n = g.rows();
  Preconditioned out;
  out.d.resize(n);
  for (Index i = 0; i < n; ++i) out.d[i] = std::sqrt(std::max(g(i, i), kDiagEps));
  out.G.resize(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out.G(i, j) = g(i, j) / (out.d[i] * out.d[j]);
  out.W = w;
  for (Index i = 0; i < n; ++i) out.W.row(i) *= out.d[i];
  return out;
}

SparsityMask topk_mask(const DenseMatrix& scores, std::int64_t z) {
  const Index total = scores.size();
  require(z >= 0 && z <= total, "topk_mask: z out of range");
  SparsityMask mask = SparsityMask::zeros(scores.rows(), scores.cols());
  if (z == 0) return mask;
  if (z == total) return SparsityMask::ones(scores.rows(), scores.cols());
  const double* sd = scores.data();
  std::vector<Index> idx(static_cast<size_t>(total));
  std::iota(idx.begin(), idx.end(), Index{0});
  const auto better = [sd](Index a, Index b) {
    if (sd[a] != sd[b]) return sd[a] > sd[b];
    return a < b;  // ties go to the smaller row-major index
  };
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(z - 1), idx.end(),
                   better);
  for (std::int64_t i = 0; i < z; ++i) mask.bits[static_cast<size_t>(idx[static_cast<size_t>(i)])] = 1;
  return mask;
}

namespace {

// Shared three-step iteration. `project` maps (t, W_hat + U) to the new Z and
// records the mask it used.
template <typename Project>
AdmmResult run_admm(const SparseRegressionProblem& prob, std::int64_t iters,
                    const std::optional<AdmmState>& warm, double rho0, Project project) {
  require(prob.G.rows() == prob.G.cols(), "admm: Gram matrix must be square");
  require(prob.T.rows() == prob.G.rows(), "admm: target row count mismatch");
  require(iters >= 1, "admm: iters must be >= 1");
  require(rho0 > 0.0 && rho0 <= 1.0, "admm: rho0 must be in (0,1]");
  const Index n = prob.T.rows(), m = prob.T.cols();

  DenseMatrix z, u;
  if (warm.has_value()) {
    require(warm->Z.rows() == n && warm->Z.cols() == m && warm->U.rows() == n &&
                warm->U.cols() == m,
            "admm: warm state shape mismatch");
    z = warm->Z;
    u = warm->U;
  } else {
    z = DenseMatrix::Zero(n, m);
    u = DenseMatrix::Zero(n, m);
  }

  AdmmResult res;
  double rho = rho0;
  CholeskyFactor chol(prob.G, rho);
  for (std::int64_t t = 1; t <= iters; ++t) {
    if (t == 2 && rho != 1.0) {
      rho = 1.0;
      chol = CholeskyFactor(prob.G, rho);
    }
    DenseMatrix rhs = prob.T + rho * (z - u);
    DenseMatrix w_hat = chol.solve(rhs);
    DenseMatrix v = w_hat + u;
    res.mask = project(t, v);
    apply_mask(res.mask, v, z);
    u += w_hat - z;
  }
  res.Wp = z;
  res.state = AdmmState{std::move(z), std::move(u), rho};
  return res;
}

}  // namespace

AdmmResult admm_fixed_mask(const SparseRegressionProblem& prob, const SparsityMask& mask,
                           std::int64_t iters, const std::optional<AdmmState>& warm,
                           double rho0) {
  require(mask.rows == prob.T.rows() && mask.cols == prob.T.cols(),
          "admm: mask shape mismatch");
  return run_admm(prob, iters, warm, rho0,
                  [&mask](std::int64_t, const DenseMatrix&) { return mask; });
}

AdmmResult admm_search_mask(const SparseRegressionProblem& prob, std::int64_t z,
                            std::int64_t iters, const Schedule& sched,
                            const std::optional<AdmmState>& warm, double rho0) {
  const Index total = prob.T.size();
  require(z >= 0 && z <= total, "admm_search_mask: z out of range");
  return run_admm(prob, iters, warm, rho0, [&](std::int64_t t, const DenseMatrix& v) {
    std::int64_t zt = z;
    if (t < iters) {
      const std::int64_t step = std::min(t, sched.total_steps);
      const double density = cubic_density(step, sched);
      zt = std::clamp(round_count(density * static_cast<double>(total)), z, total);
    }
    DenseMatrix scores = v.cwiseAbs();
    return topk_mask(scores, zt);
  });
}

}  // namespace dsf
