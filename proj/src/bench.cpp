#include "dsf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "dsf/baselines.hpp"
#include "dsf/io.hpp"
#include "dsf/numerics.hpp"
#include "dsf/rng.hpp"

namespace dsf {

namespace {

std::int64_t round_count(double x) {
  return static_cast<std::int64_t>(x >= 0.0 ? std::floor(x + 0.5) : std::ceil(x - 0.5));
}

// Sorted z-element subset of [0, total), sampled without replacement.
std::vector<std::int64_t> sample_support(RandomStream& rs, std::int64_t total, std::int64_t z) {
  std::vector<std::int64_t> idx(static_cast<size_t>(total));
  std::iota(idx.begin(), idx.end(), std::int64_t{0});
  for (std::int64_t i = 0; i < z; ++i) {
    const std::int64_t j =
        i + static_cast<std::int64_t>(rs.next_below(static_cast<std::uint64_t>(total - i)));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  idx.resize(static_cast<size_t>(z));
  std::sort(idx.begin(), idx.end());
  return idx;
}

DenseMatrix random_sparse(RandomStream& rs, Index n, Index m, std::int64_t z) {
  DenseMatrix w = DenseMatrix::Zero(n, m);
  const std::vector<std::int64_t> support = sample_support(rs, n * m, z);
  for (const std::int64_t pos : support) w.data()[pos] = rs.normal();
  return w;
}

void add_noise(RandomStream& rs, DenseMatrix& w, double sigma) {
  if (sigma == 0.0) return;
  double* d = w.data();
  for (Index i = 0; i < w.size(); ++i) d[i] += sigma * rs.normal();
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::kDsf: return "dsf";
    case Method::kDsfNoAnneal: return "dsf_no_anneal";
    case Method::kMagnitude: return "magnitude";
    case Method::kSvd: return "svd";
    case Method::kMonarch: return "monarch";
  }
  return "unknown";
}

std::string generator_name(const Generator& g) {
  switch (g.kind) {
    case GeneratorKind::kGaussian: return "gaussian";
    case GeneratorKind::kPlantedDsf:
      return "planted:" + std::to_string(g.z_a) + "," + std::to_string(g.z_b) + "," +
             std::to_string(g.noise);
    case GeneratorKind::kLowRankPlusSparse:
      return "lowrank:" + std::to_string(g.rank) + "," + std::to_string(g.spikes) + "," +
             std::to_string(g.noise);
    case GeneratorKind::kFile: return "file:" + g.path;
  }
  return "unknown";
}

DenseMatrix generate_matrix(const Generator& gen, std::uint64_t seed, Index n, Index m) {
  require(n > 0 && m > 0, "generate_matrix: empty size");
  RandomStream rs(seed);
  switch (gen.kind) {
    case GeneratorKind::kGaussian: {
      DenseMatrix w(n, m);
      double* d = w.data();
      for (Index i = 0; i < w.size(); ++i) d[i] = rs.normal();
      return w;
    }
    case GeneratorKind::kPlantedDsf: {
      const std::int64_t z_total = round_count(gen.density * static_cast<double>(n * m));
      std::int64_t z_a = gen.z_a > 0 ? gen.z_a : round_count(static_cast<double>(z_total) / 3.0);
      z_a = std::clamp(z_a, std::int64_t{1}, n * n);
      std::int64_t z_b = gen.z_b > 0 ? gen.z_b : z_total - z_a;
      z_b = std::clamp(z_b, std::int64_t{1}, n * m);
      DenseMatrix a = random_sparse(rs, n, n, z_a);
      DenseMatrix b = random_sparse(rs, n, m, z_b);
      DenseMatrix w = matmul(a, b);
      add_noise(rs, w, gen.noise);
      return w;
    }
    case GeneratorKind::kLowRankPlusSparse: {
      const std::int64_t k = std::clamp(gen.rank, std::int64_t{1},
                                        static_cast<std::int64_t>(std::min(n, m)));
      DenseMatrix g1(n, k);
      DenseMatrix g2(k, m);
      for (Index i = 0; i < g1.size(); ++i) g1.data()[i] = rs.normal();
      for (Index i = 0; i < g2.size(); ++i) g2.data()[i] = rs.normal();
      DenseMatrix w = matmul(g1, g2);
      const std::int64_t z = std::clamp(gen.spikes, std::int64_t{0}, n * m);
      const double spike_scale = std::sqrt(static_cast<double>(k));
      for (const std::int64_t pos : sample_support(rs, n * m, z)) {
        w.data()[pos] += spike_scale * rs.normal();
      }
      add_noise(rs, w, gen.noise);
      return w;
    }
    case GeneratorKind::kFile: {
      DenseMatrix full = read_dsfm(gen.path);
      if (full.rows() < n || full.cols() < m) {
        throw IoError("generate_matrix: file matrix smaller than requested size");
      }
      DenseMatrix w = full.topLeftCorner(n, m);
      return w;
    }
  }
  throw std::invalid_argument("generate_matrix: unknown generator");
}

namespace {

TrialResult run_trial(const BenchSpec& spec, Index n, Index m, std::uint64_t seed,
                      Method method) {
  TrialResult trial;
  trial.method = method;
  trial.n = n;
  trial.m = m;
  trial.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Generator gen = spec.generator;
    gen.density = spec.density;
    const DenseMatrix w = generate_matrix(gen, seed, n, m);
    const double norm_w = frobenius_norm(w);
    if (norm_w == 0.0) throw NumericalError("trial matrix is zero");
    const std::int64_t z_total = round_count(spec.density * static_cast<double>(n * m));

    const SparseFactor mag = magnitude_prune(w, z_total);
    const double rel_mag = frobenius_error(mag.to_dense(), w) / norm_w;

    DenseMatrix approx;
    switch (method) {
      case Method::kMagnitude: {
        approx = mag.to_dense();
        trial.nnz_used = mag.nnz();
        break;
      }
      case Method::kDsf:
      case Method::kDsfNoAnneal: {
        const BudgetSplit split = split_budget(n, m, z_total, spec.split);
        DsfConfig cfg = spec.dsf_cfg;
        cfg.anneal = method == Method::kDsf;
        const FactorPair pair = dsf_project(w, split, cfg);
        approx = pair.product_dense();
        trial.nnz_used = pair.A.nnz() + pair.B.nnz();
        break;
      }
      case Method::kSvd: {
        const std::int64_t k = rank_for_budget(n, m, z_total);
        if (k == 0) {
          approx = DenseMatrix::Zero(n, m);
          trial.nnz_used = 0;
        } else {
          const FactorPair pair = low_rank_project(w, k);
          approx = pair.product_dense();
          trial.nnz_used = k * (n + m);
        }
        break;
      }
      case Method::kMonarch: {
        require(n == m, "monarch requires a square matrix");
        const Index b = monarch_block_count(n, spec.density);
        const FactorPair pair = monarch_project(w, b);
        approx = pair.product_dense();
        trial.nnz_used = n * b + n * (n / b);
        const double achieved = static_cast<double>(trial.nnz_used) /
                                static_cast<double>(n * m);
        trial.non_comparable = std::abs(achieved - spec.density) > 0.02;
        break;
      }
    }

    trial.rel_error = frobenius_error(approx, w) / norm_w;
    if (trial.rel_error == rel_mag) {
      trial.normalized_error = 1.0;
    } else if (rel_mag > 0.0) {
      trial.normalized_error = trial.rel_error / rel_mag;
    } else {
      throw NumericalError("magnitude baseline is exact; normalized error undefined");
    }
  } catch (const std::exception& e) {
    trial.error = e.what();
    trial.rel_error = std::numeric_limits<double>::quiet_NaN();
    trial.normalized_error = std::numeric_limits<double>::quiet_NaN();
    trial.nnz_used = 0;
  }
  trial.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return trial;
}

}  // namespace

BenchReport run_bench(const BenchSpec& spec) {
  require(!spec.sizes.empty(), "run_bench: no sizes");
  require(!spec.seeds.empty(), "run_bench: no seeds");
  require(!spec.methods.empty(), "run_bench: no methods");
  require(spec.density > 0.0 && spec.density <= 1.0, "run_bench: density out of (0,1]");

  struct Desc {
    Index n, m;
    std::uint64_t seed;
    Method method;
  };
  std::vector<Desc> descs;
  for (const auto& size : spec.sizes)
    for (const std::uint64_t seed : spec.seeds)
      for (const Method method : spec.methods)
        descs.push_back(Desc{size.first, size.second, seed, method});

  BenchReport report;
  report.spec = spec;
  report.trials.resize(descs.size());

  const int jobs = std::max(1, spec.jobs);
  if (jobs == 1) {
    for (size_t i = 0; i < descs.size(); ++i) {
      const Desc& d = descs[i];
      report.trials[i] = run_trial(spec, d.n, d.m, d.seed, d.method);
    }
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= descs.size()) return;
        const Desc& d = descs[i];
        report.trials[i] = run_trial(spec, d.n, d.m, d.seed, d.method);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Aggregate in trial order; the map key ordering fixes the output order.
  std::map<std::string, std::vector<double>> groups;
  for (const TrialResult& t : report.trials) {
    if (!t.error.empty()) continue;
    const std::string key = std::string(method_name(t.method)) + ":" + std::to_string(t.n) +
                            "x" + std::to_string(t.m);
    groups[key].push_back(t.normalized_error);
  }
  for (const auto& [key, values] : groups) {
    Aggregate agg;
    agg.count = static_cast<std::int64_t>(values.size());
    double sum = 0.0;
    for (const double v : values) sum += v;
    agg.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (const double v : values) sq += (v - agg.mean) * (v - agg.mean);
    agg.stddev = std::sqrt(sq / static_cast<double>(values.size()));
    report.aggregates[key] = agg;
  }
  return report;
}

}  // namespace dsf
