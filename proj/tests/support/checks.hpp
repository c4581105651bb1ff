#pragma once

#include "condbb/scalar.hpp"
#include "condbb/simple_function.hpp"

#include <vector>

namespace condbb::testing {

/// |a − b| ≤ tol; exact equality for rationals regardless of tol.
template <class T>
bool near(const T& a, const T& b, double tol = 1e-12) {
  if constexpr (NumTraits<T>::exact)
    return a == b;
  else
    return abs_value(a - b) <= tol;
}

template <class T, class Tag>
bool near(const PiecewiseConstant<T, Tag>& f, const std::vector<double>& expected, double tol = 1e-12) {
  if (f.data().size() != expected.size()) return false;
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (abs_value(to_double(f.data()[i]) - expected[i]) > tol) return false;
  return true;
}

template <class T>
std::vector<double> doubles(std::span<const T> values) {
  std::vector<double> out;
  for (const auto& v : values) out.push_back(to_double(v));
  return out;
}

}  // namespace condbb::testing
