#pragma once

#include <cstdint>
#include <optional>

#include "dsf/sparse.hpp"

namespace dsf {

enum class ScheduleMode { kConstant, kCubic };

/// Density schedule for gradual mask search. Cubic mode ramps the pruned
/// fraction as s_t = s_f*(1 - (1 - t/T)^3); constant mode sits at the final
/// density from the first step on.
struct Schedule {
  ScheduleMode mode = ScheduleMode::kConstant;
  std::int64_t total_steps = 1;
  double final_density = 1.0;
};

/// Kept-entry density at step t, 0 <= t <= total_steps. t = 0 is always 1.
double cubic_density(std::int64_t t, const Schedule& sched);

/// ADMM auxiliary variable Z, scaled duals U and the penalty last used.
/// Carrying this across calls warm-starts the iteration.
struct AdmmState {
  DenseMatrix Z;
  DenseMatrix U;
  double rho = 1.0;
};

/// L0-constrained regression in normal-equation form: design Gram G (n x n),
/// target T = G W_target (n x m), and a reference W_ref of the target's shape
/// used for scoring seeds.
struct SparseRegressionProblem {
  DenseMatrix G;
  DenseMatrix T;
  DenseMatrix W_ref;
};

struct Preconditioned {
  DenseMatrix G;  // D^-1 G D^-1, unit diagonal wherever G_ii > eps
  DenseMatrix W;  // D W
  Vector d;       // d_i = sqrt(max(G_ii, eps))
};

/// Rescales the problem so the Gram diagonal is one. The objective
/// ||X(W - W')|| is invariant under (G, W, W') -> (Gp, DW, DW').
Preconditioned precondition(const DenseMatrix& g, const DenseMatrix& w);

/// Mask of the z largest scores; ties go to the smallest row-major index.
SparsityMask topk_mask(const DenseMatrix& scores, std::int64_t z);

struct AdmmResult {
  DenseMatrix Wp;    // final Z, support within the (final) mask
  SparsityMask mask;
  AdmmState state;
};

/// Fixed-mask ADMM: W_hat <- (G + rho I)^-1 (T + rho (Z - U));
/// Z <- M o (W_hat + U); U <- U + W_hat - Z. The first iteration runs at
/// rho0, every later one at rho = 1. Cold starts use Z = 0, U = 0.
AdmmResult admm_fixed_mask(const SparseRegressionProblem& prob, const SparsityMask& mask,
                           std::int64_t iters, const std::optional<AdmmState>& warm,
                           double rho0);

/// Mask-searching ADMM: the Z step projects W_hat + U onto its top-z_t
/// entries by absolute value, with z_t driven by the schedule and clamped to
/// at least z. The final mask has exactly z nonzeros.
AdmmResult admm_search_mask(const SparseRegressionProblem& prob, std::int64_t z,
                            std::int64_t iters, const Schedule& sched,
                            const std::optional<AdmmState>& warm, double rho0);

}  // namespace dsf
