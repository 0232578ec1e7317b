#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace neq {

/// Exact fraction with a small interface; avoids committing the per-row base
/// cell count to floating point.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  bool integral() const { return num % den == 0; }
  int64_t floor_val() const { return num / den; }                          // num, den > 0 here
  int64_t ceil_val() const { return (num + den - 1) / den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct CellQuota {
  int32_t n = 0;
  uint64_t total = 0;            // cells that must be explicitly computed
  Rational base;                 // total / n
  std::vector<int32_t> per_row;  // length n, each floor or ceil of base
};

/// Columns one row must explicitly compute: starts at the diagonal and
/// advances modulo n, so it may wrap from the upper into the lower triangle.
struct CellAssignment {
  int32_t row = 0;
  std::vector<int32_t> columns;
};

uint64_t global_cell_count(int32_t n);

Rational base_per_row(int32_t n);

int32_t quota_for_row(int32_t n, int32_t row);

CellQuota row_quotas(int32_t n);

CellAssignment assigned_columns(int32_t n, int32_t row);

/// Enumerates every row's assignment and reports whether each unordered index
/// pair (including the diagonal) is covered by exactly one computed cell.
bool verify_exact_coverage(int32_t n);

/// Text grid with 'X' for computed cells, '.' otherwise; one row per line.
std::string render_assignment_grid(int32_t n);

}  // namespace neq
