#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dsf/factorization.hpp"

namespace dsf {

enum class GeneratorKind { kGaussian, kPlantedDsf, kLowRankPlusSparse, kFile };

/// Synthetic matrix source. Planted budgets of zero are derived from
/// `density` (a third split of round(density*n*m)) at generation time.
struct Generator {
  GeneratorKind kind = GeneratorKind::kGaussian;
  std::int64_t z_a = 0;
  std::int64_t z_b = 0;
  std::int64_t rank = 1;    // low-rank component rank
  std::int64_t spikes = 0;  // sparse spike count
  double noise = 0.0;
  double density = 0.25;
  std::string path;  // kFile: DSFM container, truncated to the trial size
};

enum class Method { kDsf, kDsfNoAnneal, kMagnitude, kSvd, kMonarch };

const char* method_name(Method m);
std::string generator_name(const Generator& g);

struct BenchSpec {
  Generator generator;
  std::vector<std::pair<Index, Index>> sizes;
  double density = 0.25;
  std::vector<std::uint64_t> seeds;
  std::vector<Method> methods;
  DsfConfig dsf_cfg;
  SplitRule split;
  int jobs = 1;
};

struct TrialResult {
  Method method = Method::kMagnitude;
  Index n = 0;
  Index m = 0;
  std::uint64_t seed = 0;
  std::int64_t nnz_used = 0;
  double rel_error = 0.0;
  double normalized_error = 0.0;
  double wall_seconds = 0.0;
  std::string error;            // empty on success
  bool non_comparable = false;  // structurally fixed density missed the target
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
  std::int64_t count = 0;
};

struct BenchReport {
  BenchSpec spec;
  std::vector<TrialResult> trials;
  std::map<std::string, Aggregate> aggregates;  // "method:nxm"
};

/// Deterministic per (generator, seed, n, m).
DenseMatrix generate_matrix(const Generator& gen, std::uint64_t seed, Index n, Index m);

/// Runs every (size, seed, method) trial under the shared nonzero budget
/// round(density*n*m) and normalizes errors by magnitude pruning on the same
/// matrix and budget. Trial failures are recorded per trial; the report
/// always completes. Identical specs produce identical reports up to the
/// wall_seconds fields, regardless of the job count.
BenchReport run_bench(const BenchSpec& spec);

}  // namespace dsf
