#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace neq {

/// Indirect-index accumulation workload. Both the destination row and the
/// source offset are looked up through index arrays, which defeats hardware
/// prefetching; the pipelined variant issues software prefetches a fixed
/// distance ahead instead.
struct IrregularWorkload {
  int32_t extent = 0;       // both loop extents
  int32_t matrix_rows = 0;  // destination rows
  int32_t source_len = 0;
  std::vector<double> matrix;      // matrix_rows x extent, row-major
  std::vector<double> equations;   // source_len
  std::vector<int32_t> dataloc;    // extent, destination row per inner index
  std::vector<int32_t> inputdata;  // extent x extent, source offset per (i, j)
  double weight = 1.0;
  int32_t prefetch_distance = 16;  // 0 selects the plain kernel

  void validate() const;
};

IrregularWorkload make_random_workload(int32_t extent, uint64_t seed);

/// matrix[dataloc[i], j] += weight * equations[inputdata[i, j]] over the
/// full (j, i) loop nest, no prefetching.
void run_plain(IrregularWorkload& w);

/// Two-stage software pipeline: a warm-up prefetch of the first
/// prefetch_distance elements per outer iteration, then an in-loop prefetch
/// running prefetch_distance ahead of the accumulation. Output is
/// bit-identical to run_plain; the hints have no semantic effect.
void run_pipelined(IrregularWorkload& w);

struct BenchRow {
  std::string variant;  // "plain" or "pipelined"
  int32_t distance = 0;
  double median_ns = 0.0;
  int32_t iterations = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::string machine_id;

  std::string to_csv() const;
};

/// Times the plain kernel and the pipelined kernel at each requested
/// distance, median over repetitions. Timings carry the machine id and are
/// never asserted against; ordering is hardware-dependent.
BenchReport bench_kernel(const IrregularWorkload& w, std::span<const int32_t> distances,
                         int32_t repetitions);

std::string machine_id();

}  // namespace neq
