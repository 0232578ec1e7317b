#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "core/assembly.hpp"
#include "core/matrix.hpp"

namespace neq {
namespace oracle {

// Brute-force references for the test suites. These deliberately do not
// reuse the summation loops or factorizations of the modules they check.

struct FullSystem {
  DenseMatrix matrix;
  std::vector<double> rhs;
};

/// Single-rank reference build: diagonal and upper triangle by direct
/// summation over all data in datum order, then the upper half copied into
/// the lower half.
FullSystem build_full_matrix(const ProblemSpec& spec);

/// Direct solve via LU with partial pivoting.
std::vector<double> dense_solve(const DenseMatrix& a, std::span<const double> b);

/// The cell that computes each unordered index pair. Throws a
/// coverage-violation error naming the first duplicated or missing pair.
std::map<std::pair<int32_t, int32_t>, std::pair<int32_t, int32_t>> enumerate_coverage(int32_t n);

}  // namespace oracle
}  // namespace neq
