#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "core/errors.hpp"
#include "core/iterative_solver.hpp"
#include "core/oracle.hpp"
#include "core/spectral_solver.hpp"

using namespace neq;

TEST_CASE("identity converges in one iteration") {
  const std::vector<double> b = {1.0, -2.0, 3.0};
  const IterativeResult r = solve_iterative(DenseMatrix::identity(3), b, {});
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.x == b);
  CHECK(r.final_residual == 0.0);
}

TEST_CASE("2x2 system matches the direct solve") {
  DenseMatrix a(2, 2);
  a(0, 0) = 4.0;
  a(0, 1) = a(1, 0) = 1.0;
  a(1, 1) = 3.0;
  const std::vector<double> b = {1.0, 2.0};
  const IterativeResult r = solve_iterative(a, b, {});
  REQUIRE(r.converged);
  // x = (1/11, 7/11)
  CHECK(r.x[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-4));
  CHECK(r.final_residual <= 1e-4);
}

TEST_CASE("solution agrees with the spectral solve on an assembled system") {
  const ProblemSpec spec{50, 1500, 31, 1.0};
  const auto sys = oracle::build_full_matrix(spec);
  const IterativeResult r = solve_iterative(sys.matrix, sys.rhs, {});
  REQUIRE(r.converged);
  const auto direct = apply_eigenpairs(eigendecompose(sys.matrix), sys.rhs, {});
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < direct.size(); ++i) {
    num += (r.x[i] - direct[i]) * (r.x[i] - direct[i]);
    den += direct[i] * direct[i];
  }
  CHECK(std::sqrt(num / den) <= 5e-3);
}

TEST_CASE("final residual is recomputed from scratch and meets the tolerance") {
  const ProblemSpec spec{30, 900, 17, 1.0};
  const auto sys = oracle::build_full_matrix(spec);
  for (double tol : {1e-2, 1e-4, 1e-6}) {
    IterativeConfig cfg;
    cfg.rel_tolerance = tol;
    const IterativeResult r = solve_iterative(sys.matrix, sys.rhs, cfg);
    REQUIRE(r.converged);
    CHECK(relative_residual(sys.matrix, r.x, sys.rhs) == r.final_residual);
    CHECK(r.final_residual <= tol);
  }
}

TEST_CASE("tighter tolerance never yields a larger final residual") {
  const ProblemSpec spec{30, 900, 18, 1.0};
  const auto sys = oracle::build_full_matrix(spec);
  double previous = 1.0;
  for (double tol : {1e-2, 1e-4, 1e-6, 1e-8}) {
    IterativeConfig cfg;
    cfg.rel_tolerance = tol;
    const IterativeResult r = solve_iterative(sys.matrix, sys.rhs, cfg);
    REQUIRE(r.converged);
    CHECK(r.final_residual <= previous);
    previous = r.final_residual;
  }
}

TEST_CASE("A-norm error is non-increasing over the iterates") {
  const ProblemSpec spec{12, 400, 5, 1.0};
  const auto sys = oracle::build_full_matrix(spec);
  const auto exact = oracle::dense_solve(sys.matrix, sys.rhs);

  IterativeConfig cfg;
  cfg.rel_tolerance = 1e-8;
  cfg.record_iterates = true;
  const IterativeResult r = solve_iterative(sys.matrix, sys.rhs, cfg);
  REQUIRE(r.converged);
  REQUIRE(!r.iterates.empty());

  double previous = std::numeric_limits<double>::infinity();
  for (const auto& x : r.iterates) {
    std::vector<double> e(x.size());
    for (size_t i = 0; i < x.size(); ++i) e[i] = x[i] - exact[i];
    const auto ae = matvec(sys.matrix, e);
    const double a_norm_sq = dot(e, ae);
    CHECK(a_norm_sq <= previous * (1.0 + 1e-12) + 1e-30);
    previous = a_norm_sq;
  }
}

TEST_CASE("divergence is a result, not an exception") {
  const ProblemSpec spec{40, 1200, 9, 1.0};
  const auto sys = oracle::build_full_matrix(spec);
  IterativeConfig cfg;
  cfg.rel_tolerance = 1e-12;
  cfg.max_iterations = 2;  // far too few
  const IterativeResult r = solve_iterative(sys.matrix, sys.rhs, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
  CHECK(r.trace.size() == 2);
  CHECK(r.final_residual > 1e-12);
}

TEST_CASE("config and input validation") {
  DenseMatrix a = DenseMatrix::identity(2);
  const std::vector<double> b = {1.0, 1.0};

  IterativeConfig bad;
  bad.rel_tolerance = 0.0;
  CHECK_THROWS_AS(solve_iterative(a, b, bad), Error);
  bad.rel_tolerance = 1.5;
  CHECK_THROWS_AS(solve_iterative(a, b, bad), Error);

  DenseMatrix indefinite(2, 2);
  indefinite(0, 0) = 1.0;
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(solve_iterative(indefinite, b, {}), Error);
}

TEST_CASE("iteration trace CSV lists recurrence and true residuals") {
  DenseMatrix a(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 3.0;
  const std::vector<double> b = {2.0, 3.0};
  const IterativeResult r = solve_iterative(a, b, {});
  const std::string csv = iteration_trace_csv(r);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "iteration,recurrence_residual,true_residual");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == static_cast<int>(r.trace.size()));
}
