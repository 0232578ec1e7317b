#include "core/partition.hpp"

#include <algorithm>
#include <string>

#include "core/errors.hpp"

namespace neq {

RowPartition partition_rows(int32_t n, int32_t ranks) {
  if (n < 1) fail(Errc::invalid_config, "matrix dimension must be at least 1, got " + std::to_string(n));
  if (ranks < 1 || ranks > n) {
    fail(Errc::invalid_config,
         "rank count must be in [1, n=" + std::to_string(n) + "], got " + std::to_string(ranks));
  }

  RowPartition p;
  p.n = n;
  p.ranks = ranks;
  p.starts.resize(ranks);
  p.ends.resize(ranks);

  const int32_t base = n / ranks;
  const int32_t remainder = n % ranks;
  int32_t row = 0;
  for (int32_t k = 0; k < ranks; ++k) {
    p.starts[k] = row;
    row += base + (k < remainder ? 1 : 0);
    p.ends[k] = row;
  }
  return p;
}

int32_t owner_of_row(const RowPartition& p, int32_t row) {
  if (row < 0 || row >= p.n) {
    fail(Errc::index_range, "row " + std::to_string(row) + " outside [0, " + std::to_string(p.n) + ")");
  }
  auto it = std::upper_bound(p.starts.begin(), p.starts.end(), row);
  return static_cast<int32_t>(it - p.starts.begin()) - 1;
}

}  // namespace neq
