// Command-line front end: project / prune-layer / bench / info.
// Exit codes: 0 success, 1 usage error, 2 I/O error, 3 numerical failure.

#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsf/baselines.hpp"
#include "dsf/bench.hpp"
#include "dsf/factorization.hpp"
#include "dsf/io.hpp"
#include "dsf/layerwise.hpp"
#include "dsf/numerics.hpp"

namespace {

using namespace dsf;

std::int64_t round_count(double x) {
  return static_cast<std::int64_t>(x >= 0.0 ? std::floor(x + 0.5) : std::ceil(x - 0.5));
}

SplitRule parse_split(const std::string& text) {
  if (text == "third") return SplitRule{SplitPolicy::kThirdSplit, 0.0};
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == tail.size() && !tail.empty()) {
      if (head == "density") return SplitRule{SplitPolicy::kFixedDensity, value};
      if (head == "obc") return SplitRule{SplitPolicy::kObcRule, value};
    }
  }
  throw std::invalid_argument("--split expects third, density:<alpha> or obc:<s>");
}

std::vector<double> parse_number_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    const std::string tok = text.substr(pos, comma - pos);
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size()) {
      throw std::invalid_argument(std::string(flag) + ": cannot parse '" + tok + "'");
    }
    out.push_back(v);
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    std::string tok = text.substr(pos, comma - pos);
    const size_t dots = tok.find("..");
    try {
      if (dots != std::string::npos) {
        const std::uint64_t lo = std::stoull(tok.substr(0, dots));
        const std::uint64_t hi = std::stoull(tok.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("range");
        for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
      } else {
        out.push_back(std::stoull(tok));
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("--seeds: cannot parse '" + tok + "'");
    }
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  if (out.empty()) throw std::invalid_argument("--seeds: empty list");
  return out;
}

std::vector<std::pair<Index, Index>> parse_sizes(const std::string& text) {
  std::vector<std::pair<Index, Index>> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    std::string tok = text.substr(pos, comma - pos);
    try {
      const size_t x = tok.find('x');
      if (x != std::string::npos) {
        out.emplace_back(static_cast<Index>(std::stoll(tok.substr(0, x))),
                         static_cast<Index>(std::stoll(tok.substr(x + 1))));
      } else {
        const Index n = static_cast<Index>(std::stoll(tok));
        out.emplace_back(n, n);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("--sizes: cannot parse '" + tok + "'");
    }
    if (out.back().first <= 0 || out.back().second <= 0) {
      throw std::invalid_argument("--sizes: sizes must be positive");
    }
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  if (out.empty()) throw std::invalid_argument("--sizes: empty list");
  return out;
}

Generator parse_generator(const std::string& text) {
  Generator gen;
  if (text == "gaussian") {
    gen.kind = GeneratorKind::kGaussian;
    return gen;
  }
  if (text == "planted") {
    gen.kind = GeneratorKind::kPlantedDsf;
    gen.noise = 0.1;
    return gen;
  }
  if (text.rfind("planted:", 0) == 0) {
    gen.kind = GeneratorKind::kPlantedDsf;
    const auto args = parse_number_list(text.substr(8), "--generator planted");
    if (args.size() != 3) {
      throw std::invalid_argument("--generator planted expects planted:<z_a>,<z_b>,<sigma>");
    }
    gen.z_a = static_cast<std::int64_t>(args[0]);
    gen.z_b = static_cast<std::int64_t>(args[1]);
    gen.noise = args[2];
    return gen;
  }
  if (text.rfind("lowrank:", 0) == 0) {
    gen.kind = GeneratorKind::kLowRankPlusSparse;
    const auto args = parse_number_list(text.substr(8), "--generator lowrank");
    if (args.size() != 3) {
      throw std::invalid_argument("--generator lowrank expects lowrank:<k>,<z>,<sigma>");
    }
    gen.rank = static_cast<std::int64_t>(args[0]);
    gen.spikes = static_cast<std::int64_t>(args[1]);
    gen.noise = args[2];
    return gen;
  }
  if (text.rfind("file:", 0) == 0) {
    gen.kind = GeneratorKind::kFile;
    gen.path = text.substr(5);
    if (gen.path.empty()) throw std::invalid_argument("--generator file expects file:<path>");
    return gen;
  }
  throw std::invalid_argument("--generator expects gaussian, planted[:..], lowrank:.. or file:..");
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    const std::string tok = text.substr(pos, comma - pos);
    if (tok == "dsf") out.push_back(Method::kDsf);
    else if (tok == "dsf_no_anneal") out.push_back(Method::kDsfNoAnneal);
    else if (tok == "magnitude") out.push_back(Method::kMagnitude);
    else if (tok == "svd") out.push_back(Method::kSvd);
    else if (tok == "monarch") out.push_back(Method::kMonarch);
    else throw std::invalid_argument("--methods: unknown method '" + tok + "'");
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  if (out.empty()) throw std::invalid_argument("--methods: empty list");
  return out;
}

bool parse_on_off(const std::string& text, const char* flag) {
  if (text == "on") return true;
  if (text == "off") return false;
  throw std::invalid_argument(std::string(flag) + " expects on or off");
}

struct ProjectArgs {
  std::string input, out_a, out_b;
  double density = 0.0;
  std::string split = "third";
  std::int64_t outer = 40, inner = 5;
  std::uint64_t seed = 0;
  bool no_anneal = false;
};

int cmd_project(const ProjectArgs& args) {
  const DenseMatrix w = read_dsfm(args.input);
  require(args.density > 0.0 && args.density <= 1.0, "--density must be in (0,1]");
  const std::int64_t z_total = round_count(args.density * static_cast<double>(w.size()));
  const BudgetSplit split = split_budget(w.rows(), w.cols(), z_total, parse_split(args.split));
  DsfConfig cfg;
  cfg.outer = args.outer;
  cfg.inner = args.inner;
  cfg.seed = args.seed;
  cfg.anneal = !args.no_anneal;
  const FactorPair pair = dsf_project(w, split, cfg);
  const auto [left, right] = pair.to_left_right();
  write_dsfs(args.out_a, left);
  write_dsfs(args.out_b, right);
  const double norm_w = frobenius_norm(w);
  const double rel = norm_w > 0.0 ? frobenius_error(pair.product_dense(), w) / norm_w : 0.0;
  std::printf("rel_error=%.17g nnz_a=%" PRId64 " nnz_b=%" PRId64 "\n", rel, left.nnz(),
              right.nnz());
  return 0;
}

struct PruneArgs {
  std::string weights, calib, gram, out_a, out_b;
  double density = 0.0;
  std::string split = "third";
  std::int64_t outer = 40, inner = 5;
  std::uint64_t seed = 0;
  bool no_anneal = false;
  std::string wanda = "on", finalize = "on", optimize_a = "off";
  std::int64_t finalize_iters = 30, optimize_a_iters = 30;
  std::int64_t fixed_a_mask_seed = -1;
};

int cmd_prune_layer(const PruneArgs& args) {
  if (args.calib.empty() == args.gram.empty()) {
    throw std::invalid_argument("exactly one of --calib and --gram is required");
  }
  const DenseMatrix w = read_dsfm(args.weights);
  require(args.density > 0.0 && args.density <= 1.0, "--density must be in (0,1]");
  LayerCalibration calib;
  if (!args.calib.empty()) {
    const DenseMatrix x = read_dsfm(args.calib);
    calib = accumulate_gram({x});
  } else {
    calib = calibration_from_gram(read_dsfm(args.gram));
  }

  const std::int64_t z_total = round_count(args.density * static_cast<double>(w.size()));
  DsfConfig cfg;
  cfg.outer = args.outer;
  cfg.inner = args.inner;
  cfg.seed = args.seed;
  cfg.anneal = !args.no_anneal;
  PruneOptions opts;
  opts.wanda = parse_on_off(args.wanda, "--wanda");
  opts.finalize = parse_on_off(args.finalize, "--finalize");
  opts.optimize_a = parse_on_off(args.optimize_a, "--optimize-a");
  opts.finalize_iters = args.finalize_iters;
  opts.optimize_a_iters = args.optimize_a_iters;
  if (args.fixed_a_mask_seed >= 0) {
    opts.fixed_a_mask_seed = static_cast<std::uint64_t>(args.fixed_a_mask_seed);
  }

  const PruneResult res =
      prune_layer(w, calib, z_total, parse_split(args.split), cfg, opts);
  write_dsfs(args.out_a, res.pair.A);
  write_dsfs(args.out_b, res.pair.B);
  std::printf("layer_error=%.17g nnz_a=%" PRId64 " nnz_b=%" PRId64 "\n", res.error,
              res.pair.A.nnz(), res.pair.B.nnz());
  return 0;
}

struct BenchArgs {
  std::string generator = "gaussian";
  std::string sizes = "64,256";
  double density = 0.25;
  std::string seeds = "1..20";
  std::string methods = "dsf,magnitude,svd,monarch";
  std::string split = "third";
  std::string report;
  std::int64_t outer = 40, inner = 5;
  int jobs = 1;
};

int cmd_bench(const BenchArgs& args) {
  BenchSpec spec;
  spec.generator = parse_generator(args.generator);
  spec.generator.density = args.density;
  spec.sizes = parse_sizes(args.sizes);
  spec.density = args.density;
  spec.seeds = parse_seeds(args.seeds);
  spec.methods = parse_methods(args.methods);
  spec.split = parse_split(args.split);
  spec.dsf_cfg.outer = args.outer;
  spec.dsf_cfg.inner = args.inner;
  spec.jobs = args.jobs;
  require(spec.density > 0.0 && spec.density <= 1.0, "--density must be in (0,1]");
  require(args.jobs >= 1, "--jobs must be >= 1");

  const BenchReport report = run_bench(spec);
  write_file_atomic(args.report, report_to_json(report));
  std::int64_t failures = 0;
  for (const TrialResult& t : report.trials) failures += !t.error.empty();
  std::printf("report=%s trials=%zu errors=%" PRId64 "\n", args.report.c_str(),
              report.trials.size(), failures);
  return 0;
}

int cmd_info(const std::string& input) {
  const FileInfo info = inspect_file(input);
  std::printf("format=%s version=%u rows=%lld cols=%lld nnz=%" PRId64 " density=%.6f\n",
              info.format.c_str(), info.version, static_cast<long long>(info.rows),
              static_cast<long long>(info.cols), info.nnz, info.density);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double sparse factorization: factor a dense matrix into two sparse ones"};
  app.require_subcommand(1);

  ProjectArgs pa;
  CLI::App* project = app.add_subcommand("project", "Sparse-times-sparse projection of a matrix");
  project->add_option("--input", pa.input, "input DSFM matrix")->required();
  project->add_option("--density", pa.density, "total nonzero fraction (0,1]")->required();
  project->add_option("--split", pa.split, "budget split: third|density:<a>|obc:<s>");
  project->add_option("--outer", pa.outer, "outer iterations");
  project->add_option("--inner", pa.inner, "inner ADMM iterations");
  project->add_option("--seed", pa.seed, "config seed (echoed into outputs)");
  project->add_option("--out-a", pa.out_a, "left factor output (DSFS)")->required();
  project->add_option("--out-b", pa.out_b, "right factor output (DSFS)")->required();
  project->add_flag("--no-anneal", pa.no_anneal, "disable the first-iteration penalty ramp");

  PruneArgs ra;
  CLI::App* prune = app.add_subcommand("prune-layer", "Layer-wise pruning with calibration data");
  prune->add_option("--weights", ra.weights, "weight matrix (DSFM)")->required();
  prune->add_option("--calib", ra.calib, "calibration input X (DSFM)");
  prune->add_option("--gram", ra.gram, "precomputed Gram matrix X^T X (DSFM)");
  prune->add_option("--density", ra.density, "total nonzero fraction (0,1]")->required();
  prune->add_option("--split", ra.split, "budget split: third|density:<a>|obc:<s>");
  prune->add_option("--outer", ra.outer, "outer iterations");
  prune->add_option("--inner", ra.inner, "inner ADMM iterations");
  prune->add_option("--seed", ra.seed, "config seed");
  prune->add_flag("--no-anneal", ra.no_anneal, "disable the first-iteration penalty ramp");
  prune->add_option("--wanda", ra.wanda, "scale rows by input feature norms: on|off");
  prune->add_option("--finalize", ra.finalize, "re-solve the right factor: on|off");
  prune->add_option("--optimize-a", ra.optimize_a, "refine the left factor: on|off");
  prune->add_option("--finalize-iters", ra.finalize_iters, "finalization ADMM iterations");
  prune->add_option("--optimize-a-iters", ra.optimize_a_iters, "left-factor ADMM iterations");
  prune->add_option("--fixed-a-mask-seed", ra.fixed_a_mask_seed,
                    "freeze the square factor to a seeded random mask");
  prune->add_option("--out-a", ra.out_a, "left factor output (DSFS)")->required();
  prune->add_option("--out-b", ra.out_b, "right factor output (DSFS)")->required();

  BenchArgs ba;
  CLI::App* bench = app.add_subcommand("bench", "Reconstruction-error benchmark");
  bench->add_option("--generator", ba.generator,
                    "gaussian | planted[:za,zb,sigma] | lowrank:k,z,sigma | file:<path>");
  bench->add_option("--sizes", ba.sizes, "comma list: 64,256 or 64x128");
  bench->add_option("--density", ba.density, "total nonzero fraction (0,1]");
  bench->add_option("--seeds", ba.seeds, "comma list and/or ranges: 1..20");
  bench->add_option("--methods", ba.methods, "dsf,dsf_no_anneal,magnitude,svd,monarch");
  bench->add_option("--split", ba.split, "budget split for dsf methods");
  bench->add_option("--outer", ba.outer, "dsf outer iterations");
  bench->add_option("--inner", ba.inner, "dsf inner iterations");
  bench->add_option("--report", ba.report, "JSON report output path")->required();
  bench->add_option("--jobs", ba.jobs, "worker threads");

  std::string info_input;
  CLI::App* info = app.add_subcommand("info", "Describe a DSFM/DSFS container");
  info->add_option("--input", info_input, "file to inspect")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (project->parsed()) return cmd_project(pa);
    if (prune->parsed()) return cmd_prune_layer(ra);
    if (bench->parsed()) return cmd_bench(ba);
    if (info->parsed()) return cmd_info(info_input);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
