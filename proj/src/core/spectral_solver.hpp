#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace neq {

/// Full eigensystem of a symmetric matrix, sorted by descending eigenvalue
/// magnitude. Eigenvectors are the columns of `eigenvectors`.
struct Spectrum {
  std::vector<double> eigenvalues;
  DenseMatrix eigenvectors;
  int32_t count = 0;
};

enum class SpectralMode { full, split };

struct SolverConfig {
  double threshold = 0.0;       // eigenpairs with |lambda| <= threshold are discarded
  SpectralMode mode = SpectralMode::full;
  int32_t requested_pairs = 0;  // 0 means all n
};

/// Cyclic Jacobi eigendecomposition. Input must be symmetric to within
/// 1e-12 relative; all n pairs are returned.
Spectrum eigendecompose(const DenseMatrix& a);

/// Truncated spectral solve: x = sum over retained pairs of (v.b / lambda) v,
/// where a pair is retained when |lambda| > threshold.
std::vector<double> apply_eigenpairs(const Spectrum& s, std::span<const double> b,
                                     const SolverConfig& cfg);

/// Two-pass solve: decompose and apply the larger-magnitude half of the
/// spectrum, then decompose again and apply the smaller half. The partial
/// solutions sum to the full-mode answer.
std::vector<double> solve_split(const DenseMatrix& a, std::span<const double> b,
                                const SolverConfig& cfg);

/// Dispatches on cfg.mode.
std::vector<double> solve_spectral(const DenseMatrix& a, std::span<const double> b,
                                   const SolverConfig& cfg);

/// CSV dump of the eigenvalues in descending magnitude order.
std::string eigenvalues_csv(const Spectrum& s);

}  // namespace neq
