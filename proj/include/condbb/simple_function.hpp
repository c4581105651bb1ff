#pragma once

#include "condbb/errors.hpp"
#include "condbb/scalar.hpp"

#include <span>
#include <string>
#include <vector>

namespace condbb {

struct CellTag {};
struct BlockTag {};

/// A vector-valued function constant on each row (cell or block), stored
/// row-major. The tag keeps 𝒜-measurable (per cell) and 𝒞-measurable (per
/// block) values apart at the type level.
template <class T, class Tag>
class PiecewiseConstant {
 public:
  PiecewiseConstant() = default;

  PiecewiseConstant(std::size_t rows, std::size_t dim, std::vector<T> values)
      : rows_(rows), dim_(dim), values_(std::move(values)) {
    if (dim_ == 0) throw InvalidArgument("function dimension must be positive");
    if (values_.size() != rows_ * dim_)
      throw InvalidArgument("expected " + std::to_string(rows_ * dim_) + " values, got " +
                            std::to_string(values_.size()));
    for (const auto& v : values_)
      if (!is_finite(v)) throw InvalidArgument("function has a non-finite entry");
  }

  static PiecewiseConstant zeros(std::size_t rows, std::size_t dim) {
    return PiecewiseConstant(rows, dim, std::vector<T>(rows * dim, T(0)));
  }

  static PiecewiseConstant scalar(std::vector<T> values) {
    const auto n = values.size();
    return PiecewiseConstant(n, 1, std::move(values));
  }

  static PiecewiseConstant constant(std::size_t rows, const std::vector<T>& value) {
    std::vector<T> values;
    values.reserve(rows * value.size());
    for (std::size_t r = 0; r < rows; ++r) values.insert(values.end(), value.begin(), value.end());
    return PiecewiseConstant(rows, value.size(), std::move(values));
  }

  static PiecewiseConstant from_rows(const std::vector<std::vector<T>>& rows) {
    if (rows.empty()) throw InvalidArgument("function needs at least one row");
    std::vector<T> values;
    for (const auto& row : rows) {
      if (row.size() != rows.front().size()) throw InvalidArgument("ragged function rows");
      values.insert(values.end(), row.begin(), row.end());
    }
    return PiecewiseConstant(rows.size(), rows.front().size(), std::move(values));
  }

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }

  std::span<const T> at(std::size_t r) const { return {values_.data() + r * dim_, dim_}; }
  std::span<T> at(std::size_t r) { return {values_.data() + r * dim_, dim_}; }
  const T& operator()(std::size_t r, std::size_t j) const { return values_[r * dim_ + j]; }
  T& operator()(std::size_t r, std::size_t j) { return values_[r * dim_ + j]; }

  std::span<const T> data() const { return values_; }

  std::vector<std::vector<T>> to_rows() const {
    std::vector<std::vector<T>> out;
    for (std::size_t r = 0; r < rows_; ++r) out.emplace_back(at(r).begin(), at(r).end());
    return out;
  }

  PiecewiseConstant component(std::size_t j) const {
    std::vector<T> values;
    for (std::size_t r = 0; r < rows_; ++r) values.push_back((*this)(r, j));
    return PiecewiseConstant(rows_, 1, std::move(values));
  }

  PiecewiseConstant& operator+=(const PiecewiseConstant& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  PiecewiseConstant& operator-=(const PiecewiseConstant& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  PiecewiseConstant& operator*=(const T& s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  friend PiecewiseConstant operator+(PiecewiseConstant a, const PiecewiseConstant& b) { return a += b; }
  friend PiecewiseConstant operator-(PiecewiseConstant a, const PiecewiseConstant& b) { return a -= b; }
  friend PiecewiseConstant operator*(const T& s, PiecewiseConstant a) { return a *= s; }

  friend bool operator==(const PiecewiseConstant& a, const PiecewiseConstant& b) {
    return a.rows_ == b.rows_ && a.dim_ == b.dim_ && a.values_ == b.values_;
  }

  void require_same_shape(const PiecewiseConstant& o) const {
    if (o.rows_ != rows_ || o.dim_ != dim_) throw InvalidArgument("function shape mismatch");
  }

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<T> values_;
};

template <class T>
using SimpleFunction = PiecewiseConstant<T, CellTag>;
template <class T>
using BlockFunction = PiecewiseConstant<T, BlockTag>;

template <class T, class Tag>
T max_abs(const PiecewiseConstant<T, Tag>& f) {
  T best(0);
  for (const auto& v : f.data()) best = std::max(best, abs_value(v));
  return best;
}

template <class T, class Tag>
T max_abs_difference(const PiecewiseConstant<T, Tag>& a, const PiecewiseConstant<T, Tag>& b) {
  a.require_same_shape(b);
  T best(0);
  for (std::size_t i = 0; i < a.data().size(); ++i) best = std::max(best, abs_value(a.data()[i] - b.data()[i]));
  return best;
}

/// Pointwise g·f for scalar g.
template <class T>
SimpleFunction<T> scale_by(const SimpleFunction<T>& g, const SimpleFunction<T>& f) {
  if (g.dim() != 1) throw InvalidArgument("scaling function must be scalar");
  if (g.rows() != f.rows()) throw InvalidArgument("function cell counts differ");
  auto out = f;
  for (std::size_t k = 0; k < f.rows(); ++k)
    for (std::size_t j = 0; j < f.dim(); ++j) out(k, j) = g(k, 0) * f(k, j);
  return out;
}

}  // namespace condbb
