#pragma once

#include <cstdint>
#include <vector>

#include "core/partition.hpp"

namespace neq {

/// One rank's rows of the normal-equations matrix plus its RHS slice.
/// Every cell carries a fill bit so "no unset cells after exchange" is a
/// checkable statement rather than a convention.
struct LocalMatrixBlock {
  int32_t n = 0;
  int32_t row_offset = 0;
  int32_t local_rows = 0;
  std::vector<double> values;   // local_rows x n, row-major
  std::vector<double> rhs;      // local_rows
  std::vector<uint8_t> filled;  // local_rows x n
  uint64_t cells_computed = 0;  // explicitly evaluated (assigned) cells

  static LocalMatrixBlock for_rank(const RowPartition& p, int32_t rank) {
    LocalMatrixBlock b;
    b.n = p.n;
    b.row_offset = p.starts[rank];
    b.local_rows = p.rows_of(rank);
    b.values.assign(static_cast<size_t>(b.local_rows) * b.n, 0.0);
    b.rhs.assign(static_cast<size_t>(b.local_rows), 0.0);
    b.filled.assign(static_cast<size_t>(b.local_rows) * b.n, 0);
    return b;
  }

  int32_t local_of(int32_t global_row) const { return global_row - row_offset; }

  double& at(int32_t local_row, int32_t col) { return values[static_cast<size_t>(local_row) * n + col]; }
  double at(int32_t local_row, int32_t col) const { return values[static_cast<size_t>(local_row) * n + col]; }

  bool is_filled(int32_t local_row, int32_t col) const {
    return filled[static_cast<size_t>(local_row) * n + col] != 0;
  }
  void mark_filled(int32_t local_row, int32_t col) { filled[static_cast<size_t>(local_row) * n + col] = 1; }

  bool fully_filled() const {
    for (uint8_t f : filled)
      if (!f) return false;
    return true;
  }
};

}  // namespace neq
