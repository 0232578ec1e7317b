#include "core/sym_assign.hpp"

#include <numeric>

#include "core/errors.hpp"

namespace neq {

namespace {

void check_dimension(int32_t n) {
  if (n < 1) fail(Errc::invalid_config, "matrix dimension must be at least 1, got " + std::to_string(n));
}

}  // namespace

uint64_t global_cell_count(int32_t n) {
  check_dimension(n);
  const uint64_t un = static_cast<uint64_t>(n);
  return un * (un + 1) / 2;
}

Rational base_per_row(int32_t n) {
  check_dimension(n);
  // f/n = n(n+1)/(2n) = (n+1)/2
  if (n % 2 == 1) return {(n + 1) / 2, 1};
  return {n + 1, 2};
}

int32_t quota_for_row(int32_t n, int32_t row) {
  check_dimension(n);
  if (row < 0 || row >= n) {
    fail(Errc::index_range, "row " + std::to_string(row) + " outside [0, " + std::to_string(n) + ")");
  }
  const Rational r = base_per_row(n);
  if (r.integral()) return static_cast<int32_t>(r.floor_val());

  // Even n: alternate ceil/floor starting from ceil at global row 0. The
  // only parity-sensitive pairs are those at distance n/2, and they are
  // covered exactly once iff the alternation flips between row i and row
  // i + n/2. That flip is automatic when n/2 is odd; when n/2 is even the
  // order must be swapped for the second half of the rows.
  const int32_t half = n / 2;
  bool take_ceil = (row % 2 == 0);
  if (half % 2 == 0 && row >= half) take_ceil = !take_ceil;
  return static_cast<int32_t>(take_ceil ? r.ceil_val() : r.floor_val());
}

CellQuota row_quotas(int32_t n) {
  check_dimension(n);
  CellQuota q;
  q.n = n;
  q.total = global_cell_count(n);
  q.base = base_per_row(n);
  q.per_row.resize(n);
  for (int32_t row = 0; row < n; ++row) q.per_row[row] = quota_for_row(n, row);
  return q;
}

CellAssignment assigned_columns(int32_t n, int32_t row) {
  const int32_t quota = quota_for_row(n, row);  // validates n and row
  CellAssignment a;
  a.row = row;
  a.columns.resize(quota);
  for (int32_t k = 0; k < quota; ++k) a.columns[k] = static_cast<int32_t>((row + k) % n);
  return a;
}

bool verify_exact_coverage(int32_t n) {
  check_dimension(n);
  // hits[i*n + j] for i <= j counts how often the unordered pair {i,j} is computed.
  std::vector<uint8_t> hits(static_cast<size_t>(n) * n, 0);
  for (int32_t row = 0; row < n; ++row) {
    const CellAssignment a = assigned_columns(n, row);
    for (int32_t col : a.columns) {
      const int32_t lo = std::min(row, col);
      const int32_t hi = std::max(row, col);
      uint8_t& h = hits[static_cast<size_t>(lo) * n + hi];
      if (h == 1) return false;
      h = 1;
    }
  }
  for (int32_t i = 0; i < n; ++i)
    for (int32_t j = i; j < n; ++j)
      if (hits[static_cast<size_t>(i) * n + j] != 1) return false;
  return true;
}

std::string render_assignment_grid(int32_t n) {
  check_dimension(n);
  std::string out;
  out.reserve(static_cast<size_t>(n) * (n + 1));
  for (int32_t row = 0; row < n; ++row) {
    std::string line(static_cast<size_t>(n), '.');
    for (int32_t col : assigned_columns(n, row).columns) line[col] = 'X';
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace neq
