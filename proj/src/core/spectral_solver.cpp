#include "core/spectral_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "core/errors.hpp"

namespace neq {

namespace {

constexpr int32_t kMaxSweeps = 100;

void check_symmetric(const DenseMatrix& a) {
  if (a.rows() != a.cols()) fail(Errc::validation, "matrix must be square");
  const double scale = std::max(a.max_abs(), 1e-300);
  for (int32_t i = 0; i < a.rows(); ++i) {
    for (int32_t j = i + 1; j < a.cols(); ++j) {
      if (std::fabs(a(i, j) - a(j, i)) > 1e-12 * scale) {
        fail(Errc::validation, "matrix asymmetric at (" + std::to_string(i) + ", " + std::to_string(j) +
                                   "): " + std::to_string(a(i, j)) + " vs " + std::to_string(a(j, i)));
      }
    }
  }
}

double off_diagonal_norm(const DenseMatrix& m) {
  double s = 0.0;
  for (int32_t p = 0; p < m.rows(); ++p)
    for (int32_t q = p + 1; q < m.cols(); ++q) s += m(p, q) * m(p, q);
  return std::sqrt(2.0 * s);
}

}  // namespace

Spectrum eigendecompose(const DenseMatrix& a) {
  check_symmetric(a);
  const int32_t n = a.rows();

  // Work on the symmetrized copy; within the asserted tolerance this is a
  // no-op for exactly symmetric input.
  DenseMatrix m(n, n);
  for (int32_t i = 0; i < n; ++i)
    for (int32_t j = 0; j < n; ++j) m(i, j) = 0.5 * (a(i, j) + a(j, i));
  DenseMatrix v = DenseMatrix::identity(n);

  const double scale = m.frobenius_norm();
  if (scale > 0.0) {
    const double target = 1e-14 * scale;
    int32_t sweep = 0;
    while (off_diagonal_norm(m) > target) {
      if (++sweep > kMaxSweeps) {
        fail(Errc::numeric, "eigendecomposition did not converge after " + std::to_string(kMaxSweeps) +
                                " sweeps; off-diagonal norm " + std::to_string(off_diagonal_norm(m)) +
                                " vs target " + std::to_string(target));
      }
      for (int32_t p = 0; p < n - 1; ++p) {
        for (int32_t q = p + 1; q < n; ++q) {
          const double apq = m(p, q);
          if (apq == 0.0) continue;
          const double app = m(p, p);
          const double aqq = m(q, q);
          const double theta = (aqq - app) / (2.0 * apq);
          const double t = theta >= 0.0 ? 1.0 / (theta + std::sqrt(theta * theta + 1.0))
                                        : 1.0 / (theta - std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          for (int32_t k = 0; k < n; ++k) {
            if (k == p || k == q) continue;
            const double akp = m(k, p);
            const double akq = m(k, q);
            m(k, p) = m(p, k) = c * akp - s * akq;
            m(k, q) = m(q, k) = s * akp + c * akq;
          }
          m(p, p) = app - t * apq;
          m(q, q) = aqq + t * apq;
          m(p, q) = m(q, p) = 0.0;
          for (int32_t k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int32_t x, int32_t y) {
    return std::fabs(m(x, x)) > std::fabs(m(y, y));
  });

  Spectrum s;
  s.count = n;
  s.eigenvalues.resize(n);
  s.eigenvectors = DenseMatrix(n, n);
  for (int32_t k = 0; k < n; ++k) {
    s.eigenvalues[k] = m(order[k], order[k]);
    for (int32_t i = 0; i < n; ++i) s.eigenvectors(i, k) = v(i, order[k]);
  }
  return s;
}

namespace {

// Applies pairs [first, last) of the sorted spectrum, keeping |lambda| > threshold.
std::vector<double> apply_pair_range(const Spectrum& s, std::span<const double> b, double threshold,
                                     int32_t first, int32_t last) {
  const int32_t n = s.eigenvectors.rows();
  if (static_cast<int32_t>(b.size()) != n) {
    fail(Errc::validation, "RHS length " + std::to_string(b.size()) + " does not match spectrum dimension " +
                               std::to_string(n));
  }
  std::vector<double> x(n, 0.0);
  for (int32_t k = first; k < last; ++k) {
    const double lambda = s.eigenvalues[k];
    if (!(std::fabs(lambda) > threshold)) continue;
    if (lambda == 0.0) fail(Errc::numeric, "retained eigenvalue is exactly zero");
    double vb = 0.0;
    for (int32_t i = 0; i < n; ++i) vb += s.eigenvectors(i, k) * b[i];
    const double coef = vb / lambda;
    for (int32_t i = 0; i < n; ++i) x[i] += coef * s.eigenvectors(i, k);
  }
  return x;
}

int32_t effective_pairs(const Spectrum& s, const SolverConfig& cfg) {
  if (cfg.threshold < 0.0) fail(Errc::invalid_config, "threshold must be non-negative");
  if (cfg.requested_pairs < 0 || cfg.requested_pairs > s.count) {
    fail(Errc::invalid_config, "requested pair count out of range");
  }
  return cfg.requested_pairs == 0 ? s.count : cfg.requested_pairs;
}

}  // namespace

std::vector<double> apply_eigenpairs(const Spectrum& s, std::span<const double> b,
                                     const SolverConfig& cfg) {
  return apply_pair_range(s, b, cfg.threshold, 0, effective_pairs(s, cfg));
}

std::vector<double> solve_split(const DenseMatrix& a, std::span<const double> b,
                                const SolverConfig& cfg) {
  std::vector<double> x;
  int32_t pairs = 0;
  int32_t half = 0;
  {
    const Spectrum s = eigendecompose(a);
    pairs = effective_pairs(s, cfg);
    half = (pairs + 1) / 2;
    x = apply_pair_range(s, b, cfg.threshold, 0, half);
  }
  // Second pass recomputes the decomposition, mirroring the scheme where
  // each half-spectrum solve stands alone.
  {
    const Spectrum s = eigendecompose(a);
    const std::vector<double> x2 = apply_pair_range(s, b, cfg.threshold, half, pairs);
    for (size_t i = 0; i < x.size(); ++i) x[i] += x2[i];
  }
  return x;
}

std::vector<double> solve_spectral(const DenseMatrix& a, std::span<const double> b,
                                   const SolverConfig& cfg) {
  if (cfg.mode == SpectralMode::split) return solve_split(a, b, cfg);
  return apply_eigenpairs(eigendecompose(a), b, cfg);
}

std::string eigenvalues_csv(const Spectrum& s) {
  std::ostringstream out;
  out.precision(17);
  out << "index,eigenvalue\n";
  for (int32_t k = 0; k < s.count; ++k) out << k << ',' << s.eigenvalues[k] << '\n';
  return out.str();
}

}  // namespace neq
