#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace neq {

enum class Preconditioner { none, jacobi };

struct IterativeConfig {
  double rel_tolerance = 1e-4;
  int32_t max_iterations = 0;  // 0 means 10 * n
  Preconditioner preconditioner = Preconditioner::jacobi;
  bool record_iterates = false;
};

struct IterationTraceRow {
  int32_t iteration = 0;
  double recurrence_residual = 0.0;  // from the CG recurrence
  double true_residual = 0.0;        // recomputed ||Ax - b|| / ||b||
};

/// Outcome of an iterative solve. Divergence is a reportable result, not an
/// error: `converged` is false and the trace shows what happened.
struct IterativeResult {
  std::vector<double> x;
  int32_t iterations = 0;
  double final_residual = 0.0;  // recomputed from scratch, never the recurrence value
  bool converged = false;
  std::vector<IterationTraceRow> trace;
  std::vector<std::vector<double>> iterates;  // only when record_iterates
};

/// Preconditioned conjugate gradients on a symmetric positive definite
/// system. Positive definiteness is checked up front with a Cholesky
/// attempt.
IterativeResult solve_iterative(const DenseMatrix& a, std::span<const double> b,
                                const IterativeConfig& cfg);

std::string iteration_trace_csv(const IterativeResult& r);

}  // namespace neq
