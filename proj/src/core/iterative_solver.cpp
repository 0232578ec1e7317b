#include "core/iterative_solver.hpp"

#include <cmath>
#include <sstream>

#include "core/errors.hpp"

namespace neq {

namespace {

void check_square_symmetric(const DenseMatrix& a) {
  if (a.rows() != a.cols()) fail(Errc::validation, "matrix must be square");
  const double scale = std::max(a.max_abs(), 1e-300);
  for (int32_t i = 0; i < a.rows(); ++i)
    for (int32_t j = i + 1; j < a.cols(); ++j)
      if (std::fabs(a(i, j) - a(j, i)) > 1e-12 * scale) {
        fail(Errc::validation, "matrix asymmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
}

// Plain Cholesky attempt; a non-positive pivot means A is not positive
// definite and CG does not apply.
void check_positive_definite(const DenseMatrix& a) {
  const int32_t n = a.rows();
  DenseMatrix l(n, n);
  for (int32_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int32_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) {
      fail(Errc::validation,
           "matrix is not positive definite (Cholesky pivot " + std::to_string(d) + " at row " +
               std::to_string(j) + ")");
    }
    l(j, j) = std::sqrt(d);
    for (int32_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int32_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
}

}  // namespace

IterativeResult solve_iterative(const DenseMatrix& a, std::span<const double> b,
                                const IterativeConfig& cfg) {
  if (!(cfg.rel_tolerance > 0.0 && cfg.rel_tolerance < 1.0)) {
    fail(Errc::invalid_config, "relative tolerance must lie in (0, 1)");
  }
  check_square_symmetric(a);
  const int32_t n = a.rows();
  if (static_cast<int32_t>(b.size()) != n) {
    fail(Errc::validation, "RHS length does not match matrix dimension");
  }
  check_positive_definite(a);

  const int32_t max_iterations = cfg.max_iterations > 0 ? cfg.max_iterations : 10 * n;

  IterativeResult result;
  result.x.assign(n, 0.0);
  const double b_norm = norm2(b);
  if (b_norm == 0.0) {
    result.converged = true;
    return result;
  }

  std::vector<double> diag_inv(n, 1.0);
  if (cfg.preconditioner == Preconditioner::jacobi) {
    for (int32_t i = 0; i < n; ++i) diag_inv[i] = 1.0 / a(i, i);
  }
  auto precondition = [&](std::span<const double> r, std::vector<double>& z) {
    for (int32_t i = 0; i < n; ++i) z[i] = diag_inv[i] * r[i];
  };

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n);
  precondition(r, z);
  std::vector<double> p = z;
  std::vector<double> q(n);
  double rz = dot(r, z);

  for (int32_t it = 1; it <= max_iterations; ++it) {
    q = matvec(a, p);
    const double pq = dot(p, q);
    if (pq == 0.0) break;
    const double alpha = rz / pq;
    for (int32_t i = 0; i < n; ++i) {
      result.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    result.iterations = it;

    const double recurrence = norm2(r) / b_norm;
    const double true_res = relative_residual(a, result.x, b);
    result.trace.push_back({it, recurrence, true_res});
    if (cfg.record_iterates) result.iterates.push_back(result.x);
    if (true_res <= cfg.rel_tolerance) {
      result.converged = true;
      break;
    }

    precondition(r, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    for (int32_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rz = rz_next;
  }

  result.final_residual = relative_residual(a, result.x, b);
  result.converged = result.final_residual <= cfg.rel_tolerance;
  return result;
}

std::string iteration_trace_csv(const IterativeResult& r) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,recurrence_residual,true_residual\n";
  for (const IterationTraceRow& row : r.trace) {
    out << row.iteration << ',' << row.recurrence_residual << ',' << row.true_residual << '\n';
  }
  return out.str();
}

}  // namespace neq
