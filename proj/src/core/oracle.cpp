#include "core/oracle.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/sym_assign.hpp"

namespace neq {
namespace oracle {

FullSystem build_full_matrix(const ProblemSpec& spec) {
  spec.validate();
  if (spec.n > 256 || spec.data_count > 100000) {
    fail(Errc::invalid_config, "reference builder is limited to n <= 256 and d <= 100000");
  }
  const int32_t n = spec.n;
  FullSystem sys;
  sys.matrix = DenseMatrix(n, n);
  sys.rhs.assign(n, 0.0);

  ProblemGenerator gen(spec);
  for (int64_t d = 0; d < spec.data_count; ++d) {
    gen.load(d);
    const double w = gen.weight();
    const double obs = gen.observation();
    const std::span<const double> g = gen.design_row();
    for (int32_t i = 0; i < n; ++i) {
      const double gi = g[i];
      sys.rhs[i] += w * (gi * obs);
      for (int32_t j = i; j < n; ++j) sys.matrix(i, j) += w * (gi * g[j]);
    }
  }
  for (int32_t i = 0; i < n; ++i)
    for (int32_t j = i + 1; j < n; ++j) sys.matrix(j, i) = sys.matrix(i, j);
  return sys;
}

std::vector<double> dense_solve(const DenseMatrix& a, std::span<const double> b) {
  if (a.rows() != a.cols()) fail(Errc::validation, "matrix must be square");
  const int32_t n = a.rows();
  if (static_cast<int32_t>(b.size()) != n) fail(Errc::validation, "RHS length does not match matrix");

  DenseMatrix lu = a;
  std::vector<int32_t> pivot(n);
  std::vector<double> x(b.begin(), b.end());

  for (int32_t col = 0; col < n; ++col) {
    int32_t best = col;
    double best_abs = std::fabs(lu(col, col));
    for (int32_t row = col + 1; row < n; ++row) {
      const double v = std::fabs(lu(row, col));
      if (v > best_abs) {
        best = row;
        best_abs = v;
      }
    }
    if (best_abs == 0.0) {
      fail(Errc::rank_deficient, "matrix is singular at elimination column " + std::to_string(col));
    }
    pivot[col] = best;
    if (best != col) {
      for (int32_t j = 0; j < n; ++j) std::swap(lu(col, j), lu(best, j));
      std::swap(x[col], x[best]);
    }
    const double inv = 1.0 / lu(col, col);
    for (int32_t row = col + 1; row < n; ++row) {
      const double factor = lu(row, col) * inv;
      lu(row, col) = factor;
      for (int32_t j = col + 1; j < n; ++j) lu(row, j) -= factor * lu(col, j);
      x[row] -= factor * x[col];
    }
  }
  for (int32_t row = n - 1; row >= 0; --row) {
    for (int32_t j = row + 1; j < n; ++j) x[row] -= lu(row, j) * x[j];
    x[row] /= lu(row, row);
  }
  return x;
}

std::map<std::pair<int32_t, int32_t>, std::pair<int32_t, int32_t>> enumerate_coverage(int32_t n) {
  if (n < 1 || n > 512) fail(Errc::invalid_config, "coverage enumeration is limited to 1 <= n <= 512");

  std::map<std::pair<int32_t, int32_t>, std::pair<int32_t, int32_t>> covered;
  for (int32_t row = 0; row < n; ++row) {
    for (int32_t col : assigned_columns(n, row).columns) {
      const std::pair<int32_t, int32_t> key{std::min(row, col), std::max(row, col)};
      auto [it, inserted] = covered.try_emplace(key, std::pair<int32_t, int32_t>{row, col});
      if (!inserted) {
        fail(Errc::validation, "pair {" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                                   "} computed by both cell (" + std::to_string(it->second.first) + ", " +
                                   std::to_string(it->second.second) + ") and cell (" +
                                   std::to_string(row) + ", " + std::to_string(col) + ")");
      }
    }
  }
  for (int32_t i = 0; i < n; ++i) {
    for (int32_t j = i; j < n; ++j) {
      if (!covered.contains({i, j})) {
        fail(Errc::validation,
             "pair {" + std::to_string(i) + ", " + std::to_string(j) + "} is never computed");
      }
    }
  }
  return covered;
}

}  // namespace oracle
}  // namespace neq
