#include "dsf/io.hpp"

#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace dsf {

namespace {

constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kDtypeF64 = 1;
constexpr std::int64_t kMaxEntries = std::int64_t{1} << 34;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& what) : bytes_(bytes), what_(what) {}

  std::uint32_t u32(const char* field) {
    check(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64(const char* field) {
    check(8, field);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }

  double f64(const char* field) { return std::bit_cast<double>(u64(field)); }

  std::string magic() {
    check(4, "magic");
    std::string m = bytes_.substr(pos_, 4);
    pos_ += 4;
    return m;
  }

  size_t remaining() const { return bytes_.size() - pos_; }

  void expect_end() const {
    if (remaining() != 0) throw IoError(what_ + ": trailing bytes after payload");
  }

 private:
  void check(size_t need, const char* field) const {
    if (remaining() < need) {
      if (std::strcmp(field, "payload") == 0) {
        throw IoError(what_ + ": payload shorter than header");
      }
      throw IoError(what_ + ": truncated " + field + " field");
    }
  }

  const std::string& bytes_;
  std::string what_;
  size_t pos_ = 0;
};

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path + ": read failed");
  return bytes;
}

std::string encode_dsfm(const DenseMatrix& w) {
  std::string out;
  out.reserve(28 + static_cast<size_t>(w.size()) * 8);
  out += "DSFM";
  put_u32(out, kVersion);
  put_u32(out, kDtypeF64);
  put_u64(out, static_cast<std::uint64_t>(w.rows()));
  put_u64(out, static_cast<std::uint64_t>(w.cols()));
  const double* d = w.data();
  for (Index i = 0; i < w.size(); ++i) put_f64(out, d[i]);
  return out;
}

std::string encode_dsfs(const SparseFactor& f) {
  std::string out;
  out += "DSFS";
  put_u32(out, kVersion);
  put_u64(out, static_cast<std::uint64_t>(f.rows));
  put_u64(out, static_cast<std::uint64_t>(f.cols));
  put_u64(out, static_cast<std::uint64_t>(f.nnz()));
  for (const std::int64_t p : f.row_ptr) put_u64(out, static_cast<std::uint64_t>(p));
  for (const std::int64_t c : f.col_idx) put_u64(out, static_cast<std::uint64_t>(c));
  for (const double v : f.values) put_f64(out, v);
  return out;
}

}  // namespace

void write_dsfm(const std::string& path, const DenseMatrix& w) {
  write_file_atomic(path, encode_dsfm(w));
}

DenseMatrix read_dsfm(const std::string& path) {
  const std::string bytes = read_all(path);
  Reader r(bytes, path);
  if (r.magic() != "DSFM") throw IoError(path + ": bad magic");
  if (r.u32("version") != kVersion) throw IoError(path + ": unsupported version");
  if (r.u32("dtype") != kDtypeF64) throw IoError(path + ": unsupported dtype");
  const std::uint64_t rows = r.u64("rows");
  const std::uint64_t cols = r.u64("cols");
  if (rows == 0 || cols == 0 || rows * cols > static_cast<std::uint64_t>(kMaxEntries)) {
    throw IoError(path + ": implausible rows/cols header");
  }
  if (r.remaining() < rows * cols * 8) throw IoError(path + ": payload shorter than header");
  DenseMatrix w(static_cast<Index>(rows), static_cast<Index>(cols));
  double* d = w.data();
  for (Index i = 0; i < w.size(); ++i) d[i] = r.f64("payload");
  r.expect_end();
  if (!w.allFinite()) throw IoError(path + ": non-finite value in payload");
  return w;
}

void write_dsfs(const std::string& path, const SparseFactor& f) {
  f.validate();
  write_file_atomic(path, encode_dsfs(f));
}

SparseFactor read_dsfs(const std::string& path) {
  const std::string bytes = read_all(path);
  Reader r(bytes, path);
  if (r.magic() != "DSFS") throw IoError(path + ": bad magic");
  if (r.u32("version") != kVersion) throw IoError(path + ": unsupported version");
  const std::uint64_t rows = r.u64("rows");
  const std::uint64_t cols = r.u64("cols");
  const std::uint64_t nnz = r.u64("nnz");
  if (rows == 0 || cols == 0 || rows * cols > static_cast<std::uint64_t>(kMaxEntries) ||
      nnz > rows * cols) {
    throw IoError(path + ": implausible rows/cols/nnz header");
  }
  SparseFactor f;
  f.rows = static_cast<Index>(rows);
  f.cols = static_cast<Index>(cols);
  f.budget = static_cast<std::int64_t>(nnz);
  f.row_ptr.resize(rows + 1);
  for (auto& p : f.row_ptr) p = static_cast<std::int64_t>(r.u64("row_ptr"));
  if (f.row_ptr.back() != static_cast<std::int64_t>(nnz)) {
    throw IoError(path + ": row_ptr does not end at nnz");
  }
  f.col_idx.resize(nnz);
  for (auto& c : f.col_idx) c = static_cast<std::int64_t>(r.u64("col_idx"));
  f.values.resize(nnz);
  for (auto& v : f.values) v = r.f64("payload");
  r.expect_end();
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(path + ": " + e.what());
  }
  return f;
}

FileInfo inspect_file(const std::string& path) {
  const std::string bytes = read_all(path);
  if (bytes.size() < 4) throw IoError(path + ": truncated magic field");
  const std::string magic = bytes.substr(0, 4);
  FileInfo info;
  if (magic == "DSFM") {
    const DenseMatrix w = read_dsfm(path);
    info.format = "DSFM";
    info.version = kVersion;
    info.rows = w.rows();
    info.cols = w.cols();
    info.nnz = 0;
    for (Index i = 0; i < w.size(); ++i) info.nnz += w.data()[i] != 0.0;
  } else if (magic == "DSFS") {
    const SparseFactor f = read_dsfs(path);
    info.format = "DSFS";
    info.version = kVersion;
    info.rows = f.rows;
    info.cols = f.cols;
    info.nnz = f.nnz();
  } else {
    throw IoError(path + ": bad magic");
  }
  info.density = static_cast<double>(info.nnz) /
                 (static_cast<double>(info.rows) * static_cast<double>(info.cols));
  return info;
}

namespace {

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out += "\"";
  return out;
}

std::string split_name(const SplitRule& rule) {
  char buf[64];
  switch (rule.policy) {
    case SplitPolicy::kThirdSplit: return "third";
    case SplitPolicy::kFixedDensity:
      std::snprintf(buf, sizeof(buf), "density:%.17g", rule.param);
      return buf;
    case SplitPolicy::kObcRule:
      std::snprintf(buf, sizeof(buf), "obc:%.17g", rule.param);
      return buf;
  }
  return "unknown";
}

}  // namespace

std::string report_to_json(const BenchReport& report) {
  const BenchSpec& spec = report.spec;
  std::string out = "{\n  \"spec\": {\n";
  out += "    \"generator\": " + json_string(generator_name(spec.generator)) + ",\n";
  out += "    \"sizes\": [";
  for (size_t i = 0; i < spec.sizes.size(); ++i) {
    if (i) out += ", ";
    out += "[" + std::to_string(spec.sizes[i].first) + ", " +
           std::to_string(spec.sizes[i].second) + "]";
  }
  out += "],\n";
  out += "    \"density\": " + json_number(spec.density) + ",\n";
  out += "    \"seeds\": [";
  for (size_t i = 0; i < spec.seeds.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(spec.seeds[i]);
  }
  out += "],\n";
  out += "    \"methods\": [";
  for (size_t i = 0; i < spec.methods.size(); ++i) {
    if (i) out += ", ";
    out += json_string(method_name(spec.methods[i]));
  }
  out += "],\n";
  out += "    \"split\": " + json_string(split_name(spec.split)) + ",\n";
  out += "    \"dsf_cfg\": {\"outer\": " + std::to_string(spec.dsf_cfg.outer) +
         ", \"inner\": " + std::to_string(spec.dsf_cfg.inner) + ", \"schedule\": " +
         json_string(spec.dsf_cfg.schedule.mode == ScheduleMode::kCubic ? "cubic" : "constant") +
         ", \"seed\": " + std::to_string(spec.dsf_cfg.seed) +
         ", \"anneal\": " + (spec.dsf_cfg.anneal ? "true" : "false") + "},\n";
  out += "    \"jobs\": " + std::to_string(spec.jobs) + "\n  },\n";

  out += "  \"trials\": [\n";
  for (size_t i = 0; i < report.trials.size(); ++i) {
    const TrialResult& t = report.trials[i];
    out += "    {\"method\": " + json_string(method_name(t.method)) +
           ", \"n\": " + std::to_string(t.n) + ", \"m\": " + std::to_string(t.m) +
           ", \"seed\": " + std::to_string(t.seed) +
           ", \"nnz_used\": " + std::to_string(t.nnz_used) +
           ", \"rel_error\": " + json_number(t.rel_error) +
           ", \"normalized_error\": " + json_number(t.normalized_error) +
           ", \"wall_seconds\": " + json_number(t.wall_seconds) + ", \"error\": " +
           (t.error.empty() ? std::string("null") : json_string(t.error));
    if (t.non_comparable) out += ", \"non_comparable\": true";
    out += "}";
    if (i + 1 < report.trials.size()) out += ",";
    out += "\n";
  }
  out += "  ],\n";

  out += "  \"aggregates\": {\n";
  size_t i = 0;
  for (const auto& [key, agg] : report.aggregates) {
    out += "    " + json_string(key) + ": {\"mean\": " + json_number(agg.mean) +
           ", \"stddev\": " + json_number(agg.stddev) +
           ", \"count\": " + std::to_string(agg.count) + "}";
    if (++i < report.aggregates.size()) out += ",";
    out += "\n";
  }
  out += "  }\n}\n";
  return out;
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError(tmp + ": write failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError(path + ": rename failed");
  }
}

}  // namespace dsf
