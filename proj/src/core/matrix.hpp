#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace neq {

/// Dense row-major matrix. Shared container only; numerical routines that
/// must stay independent of each other implement their own loops on top.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(int32_t rows, int32_t cols)
      : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * static_cast<size_t>(cols), 0.0) {}

  static DenseMatrix identity(int32_t n) {
    DenseMatrix m(n, n);
    for (int32_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int32_t rows() const noexcept { return rows_; }
  int32_t cols() const noexcept { return cols_; }

  double& operator()(int32_t i, int32_t j) { return v_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int32_t i, int32_t j) const { return v_[static_cast<size_t>(i) * cols_ + j]; }

  std::span<double> row(int32_t i) { return {&v_[static_cast<size_t>(i) * cols_], static_cast<size_t>(cols_)}; }
  std::span<const double> row(int32_t i) const {
    return {&v_[static_cast<size_t>(i) * cols_], static_cast<size_t>(cols_)};
  }

  std::vector<double>& data() noexcept { return v_; }
  const std::vector<double>& data() const noexcept { return v_; }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::fabs(x));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double x : v_) s += x * x;
    return std::sqrt(s);
  }

  bool operator==(const DenseMatrix&) const = default;

private:
  int32_t rows_ = 0;
  int32_t cols_ = 0;
  std::vector<double> v_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  std::vector<double> y(static_cast<size_t>(a.rows()), 0.0);
  for (int32_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

inline double relative_residual(const DenseMatrix& a, std::span<const double> x, std::span<const double> b) {
  std::vector<double> ax = matvec(a, x);
  double num = 0.0;
  for (size_t i = 0; i < ax.size(); ++i) {
    const double d = ax[i] - b[i];
    num += d * d;
  }
  const double den = norm2(b);
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num) / den;
}

}  // namespace neq
