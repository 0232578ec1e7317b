#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/errors.hpp"
#include "core/oracle.hpp"
#include "core/rng.hpp"
#include "core/spectral_solver.hpp"

using namespace neq;

namespace {

// SPD test matrix with a prescribed spectrum: diag(eigs) conjugated by a
// deterministic sequence of plane rotations.
DenseMatrix spd_from_spectrum(const std::vector<double>& eigs, uint64_t seed) {
  const int32_t n = static_cast<int32_t>(eigs.size());
  DenseMatrix a(n, n);
  for (int32_t i = 0; i < n; ++i) a(i, i) = eigs[i];
  for (int32_t t = 0; t < 4 * n; ++t) {
    const int32_t p = static_cast<int32_t>(mix2(seed, 3 * t) % static_cast<uint64_t>(n));
    const int32_t q = static_cast<int32_t>(mix2(seed, 3 * t + 1) % static_cast<uint64_t>(n));
    if (p == q) continue;
    const double angle = 2.0 * std::numbers::pi * unit_double(mix2(seed, 3 * t + 2));
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    for (int32_t k = 0; k < n; ++k) {
      const double akp = a(k, p);
      const double akq = a(k, q);
      a(k, p) = c * akp - s * akq;
      a(k, q) = s * akp + c * akq;
    }
    for (int32_t k = 0; k < n; ++k) {
      const double apk = a(p, k);
      const double aqk = a(q, k);
      a(p, k) = c * apk - s * aqk;
      a(q, k) = s * apk + c * aqk;
    }
  }
  for (int32_t i = 0; i < n; ++i)
    for (int32_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  return a;
}

std::vector<double> random_vector(int32_t n, uint64_t seed) {
  std::vector<double> v(n);
  for (int32_t i = 0; i < n; ++i) v[i] = 2.0 * unit_double(mix2(seed, i)) - 1.0;
  return v;
}

double rel_diff(std::span<const double> a, std::span<const double> b) {
  REQUIRE(a.size() == b.size());
  double num = 0.0;
  for (size_t i = 0; i < a.size(); ++i) num += (a[i] - b[i]) * (a[i] - b[i]);
  const double den = std::max({norm2(a), norm2(b), 1e-300});
  return std::sqrt(num) / den;
}

void check_spectrum_invariants(const DenseMatrix& a, const Spectrum& s) {
  const int32_t n = a.rows();
  const double scale = std::max(a.frobenius_norm(), 1e-300);
  for (int32_t k = 0; k < n; ++k) {
    std::vector<double> av(n, 0.0);
    for (int32_t i = 0; i < n; ++i)
      for (int32_t j = 0; j < n; ++j) av[i] += a(i, j) * s.eigenvectors(j, k);
    double residual = 0.0;
    for (int32_t i = 0; i < n; ++i) {
      const double d = av[i] - s.eigenvalues[k] * s.eigenvectors(i, k);
      residual += d * d;
    }
    REQUIRE(std::sqrt(residual) <= 1e-8 * scale);
  }
  for (int32_t k = 0; k < n; ++k) {
    for (int32_t l = k; l < n; ++l) {
      double dot_kl = 0.0;
      for (int32_t i = 0; i < n; ++i) dot_kl += s.eigenvectors(i, k) * s.eigenvectors(i, l);
      REQUIRE(std::fabs(dot_kl - (k == l ? 1.0 : 0.0)) <= 1e-10);
    }
  }
  for (int32_t k = 1; k < n; ++k) {
    REQUIRE(std::fabs(s.eigenvalues[k - 1]) >= std::fabs(s.eigenvalues[k]));
  }
}

}  // namespace

TEST_CASE("identity matrix") {
  const Spectrum s = eigendecompose(DenseMatrix::identity(3));
  REQUIRE(s.count == 3);
  for (double lambda : s.eigenvalues) CHECK(lambda == 1.0);
  check_spectrum_invariants(DenseMatrix::identity(3), s);
}

TEST_CASE("diagonal matrix keeps axis eigenvectors") {
  DenseMatrix a(2, 2);
  a(0, 0) = 4.0;
  a(1, 1) = 1.0;
  const Spectrum s = eigendecompose(a);
  CHECK(s.eigenvalues == std::vector<double>{4.0, 1.0});
  CHECK(std::fabs(s.eigenvectors(0, 0)) == 1.0);
  CHECK(std::fabs(s.eigenvectors(1, 1)) == 1.0);
}

TEST_CASE("non-symmetric input is rejected") {
  DenseMatrix a(2, 2);
  a(0, 1) = 1.0;
  a(1, 0) = 2.0;
  CHECK_THROWS_AS(eigendecompose(a), Error);
}

TEST_CASE("spectrum invariants hold on an assembled system") {
  const ProblemSpec spec{20, 400, 13, 1.0};
  const auto sys = oracle::build_full_matrix(spec);
  check_spectrum_invariants(sys.matrix, eigendecompose(sys.matrix));
}

TEST_CASE("apply_eigenpairs") {
  SUBCASE("identity with zero threshold inverts trivially") {
    const std::vector<double> b = {1.0, -2.0, 0.5};
    const auto x = apply_eigenpairs(eigendecompose(DenseMatrix::identity(3)), b, {});
    CHECK(rel_diff(x, b) <= 1e-14);
  }

  SUBCASE("threshold truncation keeps only the large pair") {
    DenseMatrix a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 0.5;
    SolverConfig cfg;
    cfg.threshold = 1.0;
    const std::vector<double> b = {2.0, 1.0};
    const auto x = apply_eigenpairs(eigendecompose(a), b, cfg);
    CHECK(x == std::vector<double>{1.0, 0.0});
  }

  SUBCASE("zero threshold reproduces the direct solve") {
    const ProblemSpec spec{20, 600, 3, 1.0};
    const auto sys = oracle::build_full_matrix(spec);
    const auto x = apply_eigenpairs(eigendecompose(sys.matrix), sys.rhs, {});
    const auto reference = oracle::dense_solve(sys.matrix, sys.rhs);
    CHECK(rel_diff(x, reference) <= 1e-8);
  }

  SUBCASE("requested pair count limits the applied pairs") {
    DenseMatrix a(3, 3);
    a(0, 0) = 4.0;
    a(1, 1) = 2.0;
    a(2, 2) = 1.0;
    SolverConfig cfg;
    cfg.requested_pairs = 2;
    const std::vector<double> b = {4.0, 2.0, 1.0};
    const auto x = apply_eigenpairs(eigendecompose(a), b, cfg);
    CHECK(x == std::vector<double>{1.0, 1.0, 0.0});
  }
}

TEST_CASE("spectral reconstruction across conditioning") {
  for (double cond : {1e2, 1e4, 1e6}) {
    std::vector<double> eigs(24);
    for (size_t k = 0; k < eigs.size(); ++k) {
      const double t = static_cast<double>(k) / (eigs.size() - 1);
      eigs[k] = std::pow(cond, -t);  // 1 down to 1/cond
    }
    const DenseMatrix a = spd_from_spectrum(eigs, 17);
    const auto b = random_vector(24, 99);
    const auto x = apply_eigenpairs(eigendecompose(a), b, {});
    CHECK(relative_residual(a, x, b) <= 1e-8);
  }
}

TEST_CASE("truncation is monotone in the threshold") {
  const ProblemSpec spec{16, 300, 5, 1.0};
  const auto sys = oracle::build_full_matrix(spec);
  const Spectrum s = eigendecompose(sys.matrix);
  int64_t previous = s.count + 1;
  for (double tau : {0.0, 1e-6, 1e-2, 1.0, 100.0, 1e6}) {
    int64_t retained = 0;
    for (double lambda : s.eigenvalues) {
      if (std::fabs(lambda) > tau) ++retained;
    }
    CHECK(retained <= previous);
    previous = retained;
  }
}

TEST_CASE("solution is invariant under eigenvector sign flips") {
  const ProblemSpec spec{10, 200, 8, 1.0};
  const auto sys = oracle::build_full_matrix(spec);
  Spectrum s = eigendecompose(sys.matrix);
  const auto x = apply_eigenpairs(s, sys.rhs, {});
  for (int32_t i = 0; i < 10; ++i) s.eigenvectors(i, 3) = -s.eigenvectors(i, 3);
  const auto flipped = apply_eigenpairs(s, sys.rhs, {});
  CHECK(x == flipped);
}

TEST_CASE("split solve equals the full solve") {
  SUBCASE("random SPD n=10") {
    const ProblemSpec spec{10, 250, 4, 1.0};
    const auto sys = oracle::build_full_matrix(spec);
    const auto full = apply_eigenpairs(eigendecompose(sys.matrix), sys.rhs, {});
    const auto split = solve_split(sys.matrix, sys.rhs, {});
    CHECK(rel_diff(full, split) <= 1e-10);
  }

  SUBCASE("n=2 splits into two halves of one pair each") {
    DenseMatrix a(2, 2);
    a(0, 0) = 3.0;
    a(1, 1) = 2.0;
    const std::vector<double> b = {6.0, 4.0};
    const auto full = apply_eigenpairs(eigendecompose(a), b, {});
    const auto split = solve_split(a, b, {});
    CHECK(rel_diff(full, split) <= 1e-14);
    CHECK(rel_diff(split, std::vector<double>{2.0, 2.0}) <= 1e-14);
  }

  SUBCASE("threshold between the halves truncates the same set in both modes") {
    const std::vector<double> eigs = {100.0, 90.0, 80.0, 0.3, 0.2, 0.1};
    const DenseMatrix a = spd_from_spectrum(eigs, 23);
    const auto b = random_vector(6, 55);
    SolverConfig cfg;
    cfg.threshold = 1.0;  // larger half all retained, smaller half all discarded
    const Spectrum s = eigendecompose(a);
    int64_t retained_full = 0;
    for (double lambda : s.eigenvalues) {
      if (std::fabs(lambda) > cfg.threshold) ++retained_full;
    }
    CHECK(retained_full == 3);
    const auto full = apply_eigenpairs(s, b, cfg);
    const auto split = solve_split(a, b, cfg);
    CHECK(rel_diff(full, split) <= 1e-12);
  }
}

TEST_CASE("solve_spectral dispatches on mode") {
  DenseMatrix a(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 4.0;
  const std::vector<double> b = {2.0, 4.0};
  SolverConfig cfg;
  cfg.mode = SpectralMode::split;
  CHECK(rel_diff(solve_spectral(a, b, cfg), std::vector<double>{1.0, 1.0}) <= 1e-14);
}

TEST_CASE("eigenvalue CSV is ordered by descending magnitude") {
  DenseMatrix a(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = -5.0;
  a(2, 2) = 3.0;
  const std::string csv = eigenvalues_csv(eigendecompose(a));
  CHECK(csv == "index,eigenvalue\n0,-5\n1,3\n2,1\n");
}
