#pragma once

#include <cstdint>
#include <vector>

#include "dsf/admm.hpp"
#include "dsf/sparse.hpp"

namespace dsf {

enum class SplitPolicy { kThirdSplit, kFixedDensity, kObcRule };

/// How a total nonzero budget is divided between the square factor (z_a)
/// and the rectangular factor (z_b).
struct SplitRule {
  SplitPolicy policy = SplitPolicy::kThirdSplit;
  double param = 0.0;  // density alpha for kFixedDensity, sparsity s for kObcRule
};

struct BudgetSplit {
  std::int64_t z_a = 0;
  std::int64_t z_b = 0;
};

/// Splits z_total. kThirdSplit gives the square factor a third of the
/// budget; kFixedDensity gives it round(alpha*n^2); kObcRule gives it
/// round(max(0.16, s/2)*n^2). The rectangular factor absorbs all rounding
/// residue so the totals are exact.
BudgetSplit split_budget(Index rows, Index cols, std::int64_t z_total, const SplitRule& rule);

struct DsfConfig {
  std::int64_t outer = 40;
  std::int64_t inner = 5;
  Schedule schedule;   // optional budget ramp across outer iterations
  std::uint64_t seed = 0;
  bool anneal = true;  // reduced first-iteration penalty per outer step
};

/// First-iteration penalty for outer step k of n_outer:
/// min(1, k/(n_outer - 3))^3, pinned to 1 when n_outer <= 3.
double anneal_rho0(std::int64_t k, std::int64_t n_outer);

struct DsfInit {
  FactorPair pair;
  AdmmState state_a;
  AdmmState state_b;
};

/// A = identity, B = magnitude pruning of W at z_b, duals zeroed.
/// Expects rows <= cols (callers transpose first) and z_a >= n.
DsfInit init_factors(const DenseMatrix& w, const BudgetSplit& split);

/// Per-outer-iteration diagnostics, filled when requested.
struct DsfTrace {
  std::vector<double> objective;       // ||A^k B^k - W||_F
  std::vector<std::int64_t> nnz_a;
  std::vector<std::int64_t> nnz_b;
};

/// Alternating sparse factorization: W ~ A*B with nnz(A) <= z_a and
/// nnz(B) <= z_b. Matrices with rows > cols are factorized transposed and
/// the returned pair carries the transposed flag.
FactorPair dsf_project(const DenseMatrix& w, const BudgetSplit& split, const DsfConfig& cfg,
                       DsfTrace* trace = nullptr);

/// Same alternation with the square factor's support frozen to `mask_a`
/// (given in the internal, possibly transposed, orientation of A).
FactorPair dsf_project_fixed_mask(const DenseMatrix& w, const BudgetSplit& split,
                                  const DsfConfig& cfg, const SparsityMask& mask_a,
                                  DsfTrace* trace = nullptr);

}  // namespace dsf
