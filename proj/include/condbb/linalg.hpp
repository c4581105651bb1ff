#pragma once

// Small dense linear algebra over double or Rational: kernel vectors by
// Gauss-Jordan elimination and a Phase-I simplex for {x ≥ 0 : Ax = b}.

#include "condbb/scalar.hpp"

#include <optional>
#include <span>
#include <vector>

namespace condbb::linalg {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }

  T max_abs() const {
    T best(0);
    for (const auto& v : data_) best = std::max(best, abs_value(v));
    return best;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// A nonzero z with Az = 0, taken from the first column that is dependent
/// on the columns before it (z has a 1 there). nullopt when A has full
/// column rank. Pivots below `pivot_tol`·max|A| count as zero.
template <class T>
std::optional<std::vector<T>> kernel_vector(Matrix<T> a, const T& pivot_tol) {
  const T threshold = pivot_tol * a.max_abs();
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    std::size_t best = a.rows();
    for (std::size_t r = row; r < a.rows(); ++r) {
      if (a(r, c) == T(0)) continue;
      if (best == a.rows() || abs_value(a(r, c)) > abs_value(a(best, c))) best = r;
      if constexpr (NumTraits<T>::exact) break;
    }
    if (best == a.rows() || !(abs_value(a(best, c)) > threshold)) {
      std::vector<T> z(a.cols(), T(0));
      z[c] = T(1);
      for (std::size_t i = 0; i < row; ++i) z[pivot_cols[i]] = -a(i, c);
      return z;
    }
    a.swap_rows(row, best);
    const T pivot = a(row, c);
    for (std::size_t j = c; j < a.cols(); ++j) a(row, j) /= pivot;
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == row || a(r, c) == T(0)) continue;
      const T factor = a(r, c);
      for (std::size_t j = c; j < a.cols(); ++j) a(r, j) -= factor * a(row, j);
    }
    pivot_cols.push_back(c);
    ++row;
  }
  return std::nullopt;
}

template <class T>
struct FeasibilityResult {
  bool feasible = false;
  std::vector<T> x;            // a basic solution when feasible
  std::vector<T> certificate;  // u with uᵀA ≥ 0 and uᵀb < 0 when infeasible
  T infeasibility = T(0);      // Phase-I optimum Σ|artificials|
};

/// Phase-I simplex with Bland's rule. Feasible when the artificial optimum
/// is at most `tol`.
template <class T>
FeasibilityResult<T> find_nonnegative_solution(const Matrix<T>& A, std::span<const T> b, const T& tol,
                                               const T& pivot_tol) {
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();
  const std::size_t width = n + m + 1;  // originals, artificials, rhs
  Matrix<T> t(m, width);
  std::vector<int> sign(m, 1);
  for (std::size_t i = 0; i < m; ++i) {
    sign[i] = b[i] < T(0) ? -1 : 1;
    const T s(sign[i]);
    for (std::size_t j = 0; j < n; ++j) t(i, j) = s * A(i, j);
    t(i, n + i) = T(1);
    t(i, n + m) = s * b[i];
  }
  const T eps = pivot_tol * std::max(T(1), t.max_abs());

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
  // Reduced costs of the Phase-I objective Σ artificials.
  std::vector<T> cost(width, T(0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) cost[j] -= t(i, j);

  for (;;) {
    std::size_t enter = n;
    for (std::size_t j = 0; j < n; ++j)
      if (cost[j] < -eps) {
        enter = j;
        break;
      }
    if (enter == n) break;
    std::size_t leave = m;
    T best_ratio(0);
    for (std::size_t i = 0; i < m; ++i) {
      if (!(t(i, enter) > eps)) continue;
      const T ratio = t(i, n + m) / t(i, enter);
      if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen in Phase I
    const T pivot = t(leave, enter);
    for (std::size_t j = 0; j < width; ++j) t(leave, j) /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || t(i, enter) == T(0)) continue;
      const T factor = t(i, enter);
      for (std::size_t j = 0; j < width; ++j) t(i, j) -= factor * t(leave, j);
    }
    const T factor = cost[enter];
    for (std::size_t j = 0; j < width; ++j) cost[j] -= factor * t(leave, j);
    basis[leave] = enter;
  }

  FeasibilityResult<T> result;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n) result.infeasibility += abs_value(t(i, n + m));
  result.feasible = !(result.infeasibility > tol);
  if (result.feasible) {
    result.x.assign(n, T(0));
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] < n) result.x[basis[i]] = std::max(T(0), t(i, n + m));
  } else {
    result.certificate.resize(m);
    for (std::size_t i = 0; i < m; ++i) result.certificate[i] = -T(sign[i]) * (T(1) - cost[n + i]);
  }
  return result;
}

}  // namespace condbb::linalg
