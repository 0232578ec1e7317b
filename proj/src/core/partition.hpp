#pragma once

#include <cstdint>
#include <vector>

namespace neq {

/// Contiguous row ownership: rank k owns global rows [starts[k], ends[k]).
/// Block sizes differ by at most one; remainder rows go to the lowest ranks.
struct RowPartition {
  int32_t n = 0;
  int32_t ranks = 0;
  std::vector<int32_t> starts;
  std::vector<int32_t> ends;

  int32_t rows_of(int32_t rank) const { return ends[rank] - starts[rank]; }
};

RowPartition partition_rows(int32_t n, int32_t ranks);

int32_t owner_of_row(const RowPartition& p, int32_t row);

}  // namespace neq
