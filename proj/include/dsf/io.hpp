#pragma once

#include <cstdint>
#include <string>

#include "dsf/bench.hpp"
#include "dsf/sparse.hpp"

namespace dsf {

// DSFM container: "DSFM", u32 version=1, u32 dtype=1 (f64), u64 rows,
// u64 cols, then rows*cols little-endian doubles in row-major order.
void write_dsfm(const std::string& path, const DenseMatrix& w);
DenseMatrix read_dsfm(const std::string& path);

// DSFS container: "DSFS", u32 version=1, u64 rows, u64 cols, u64 nnz,
// row_ptr (rows+1 u64), col_idx (nnz u64), values (nnz f64), little-endian.
void write_dsfs(const std::string& path, const SparseFactor& f);
SparseFactor read_dsfs(const std::string& path);

struct FileInfo {
  std::string format;  // "DSFM" or "DSFS"
  std::uint32_t version = 0;
  Index rows = 0;
  Index cols = 0;
  std::int64_t nnz = 0;
  double density = 0.0;
};

/// Identifies and validates a container file by magic.
FileInfo inspect_file(const std::string& path);

/// UTF-8 JSON with all numbers at 17 significant digits; non-finite values
/// serialize as null.
std::string report_to_json(const BenchReport& report);

/// Writes to a temporary sibling and renames into place.
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace dsf
