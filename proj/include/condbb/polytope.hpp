#pragma once

// Convex geometry on finite point sets in R^n: hull membership by linear
// feasibility, extreme points, and Carathéodory decompositions of
// selections of polytope-valued maps.

#include "condbb/grid.hpp"
#include "condbb/linalg.hpp"
#include "condbb/simple_function.hpp"

#include <algorithm>
#include <vector>

namespace condbb {

template <class T>
using Point = std::vector<T>;

/// V-representation of a polytope-valued map: a nonempty vertex list per cell.
template <class T>
class PolytopeMap {
 public:
  PolytopeMap(std::size_t dim, std::vector<std::vector<Point<T>>> vertices)
      : dim_(dim), vertices_(std::move(vertices)) {
    if (dim_ == 0) throw InvalidArgument("polytope dimension must be positive");
    if (vertices_.empty()) throw InvalidArgument("polytope map needs at least one cell");
    for (std::size_t k = 0; k < vertices_.size(); ++k) {
      if (vertices_[k].empty()) throw InvalidArgument("cell " + std::to_string(k) + " has no vertices");
      for (const auto& v : vertices_[k]) {
        if (v.size() != dim_) throw InvalidArgument("vertex dimension mismatch in cell " + std::to_string(k));
        for (const auto& x : v)
          if (!is_finite(x)) throw InvalidArgument("non-finite vertex in cell " + std::to_string(k));
      }
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t cell_count() const { return vertices_.size(); }
  const std::vector<Point<T>>& vertices(std::size_t k) const { return vertices_.at(k); }

 private:
  std::size_t dim_;
  std::vector<std::vector<Point<T>>> vertices_;
};

template <class T>
struct HullMembership {
  bool inside = false;
  std::vector<T> weights;               // convex weights on the vertices when inside
  std::vector<T> separating_direction;  // d with d·p < d·v for all vertices, when outside
};

/// Is p = Σ λ_q v_q with λ ≥ 0, Σ λ = 1 solvable?
template <class T>
HullMembership<T> hull_membership(const Point<T>& p, const std::vector<Point<T>>& vertices,
                                  const T& tol = NumTraits<T>::default_tolerance(),
                                  const T& pivot_tol = NumTraits<T>::pivot_tolerance()) {
  const std::size_t n = p.size();
  linalg::Matrix<T> a(n + 1, vertices.size());
  for (std::size_t q = 0; q < vertices.size(); ++q) {
    if (vertices[q].size() != n) throw InvalidArgument("vertex dimension mismatch");
    for (std::size_t j = 0; j < n; ++j) a(j, q) = vertices[q][j];
    a(n, q) = T(1);
  }
  std::vector<T> rhs(p.begin(), p.end());
  rhs.push_back(T(1));
  auto solved = linalg::find_nonnegative_solution<T>(a, rhs, tol, pivot_tol);
  HullMembership<T> out;
  out.inside = solved.feasible;
  if (solved.feasible)
    out.weights = std::move(solved.x);
  else
    out.separating_direction.assign(solved.certificate.begin(), solved.certificate.begin() + n);
  return out;
}

/// Indices of the extreme points of `points`, after dropping exact
/// duplicates (the first copy is kept). A point is extreme iff it is not in
/// the hull of the remaining ones.
template <class T>
std::vector<std::size_t> extreme_point_indices(const std::vector<Point<T>>& points,
                                               const T& tol = NumTraits<T>::default_tolerance(),
                                               const T& pivot_tol = NumTraits<T>::pivot_tolerance()) {
  if (points.empty()) throw InvalidArgument("extreme_points needs a nonempty point set");
  std::vector<std::size_t> unique;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool seen = false;
    for (auto u : unique) seen = seen || points[u] == points[i];
    if (!seen) unique.push_back(i);
  }
  std::vector<std::size_t> extreme;
  std::vector<Point<T>> others;
  for (auto i : unique) {
    others.clear();
    for (auto u : unique)
      if (u != i) others.push_back(points[u]);
    if (others.empty() || !hull_membership(points[i], others, tol, pivot_tol).inside) extreme.push_back(i);
  }
  return extreme;
}

template <class T>
std::vector<Point<T>> extreme_points(const std::vector<Point<T>>& points,
                                     const T& tol = NumTraits<T>::default_tolerance()) {
  std::vector<Point<T>> out;
  for (auto i : extreme_point_indices(points, tol)) out.push_back(points[i]);
  return out;
}

/// Shrinks the support of a convex combination to at most n+1 points
/// without changing the combination: while too many points carry weight,
/// move along a kernel vector of [v; 1] on n+2 of them until a weight
/// reaches zero (ties: smallest index leaves).
template <class T>
std::vector<T> caratheodory_reduce(const std::vector<Point<T>>& vertices, std::vector<T> weights,
                                   const T& pivot_tol = NumTraits<T>::pivot_tolerance()) {
  if (vertices.size() != weights.size()) throw InvalidArgument("one weight per vertex expected");
  if (vertices.empty()) return weights;
  const std::size_t n = vertices.front().size();
  for (;;) {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] > T(0)) support.push_back(i);
      else weights[i] = T(0);
    if (support.size() <= n + 1) break;
    support.resize(n + 2);
    linalg::Matrix<T> a(n + 1, n + 2);
    for (std::size_t c = 0; c < n + 2; ++c) {
      for (std::size_t j = 0; j < n; ++j) a(j, c) = vertices[support[c]][j];
      a(n, c) = T(1);
    }
    auto z = linalg::kernel_vector(a, pivot_tol);
    if (!z) throw Error("caratheodory_reduce: no kernel vector on n+2 columns");
    if (std::none_of(z->begin(), z->end(), [](const T& v) { return v > T(0); }))
      for (auto& v : *z) v = -v;
    std::size_t leave = n + 2;
    T theta(0);
    for (std::size_t c = 0; c < n + 2; ++c) {
      if (!((*z)[c] > T(0))) continue;
      const T ratio = weights[support[c]] / (*z)[c];
      if (leave == n + 2 || ratio < theta) {
        leave = c;
        theta = ratio;
      }
    }
    for (std::size_t c = 0; c < n + 2; ++c) {
      auto& w = weights[support[c]];
      w -= theta * (*z)[c];
      if (w < T(0)) w = T(0);
    }
    weights[support[leave]] = T(0);
  }
  return weights;
}

template <class T>
struct ConvexCombination {
  std::vector<std::size_t> support;  // indices into the vertex list, increasing
  std::vector<T> weights;            // strictly positive
};

/// Writes p as a convex combination of at most n+1 extreme points of
/// `vertices`. Throws HullMembershipError (with a separating direction)
/// when p is outside the hull.
template <class T>
ConvexCombination<T> caratheodory_decompose(const Point<T>& p, const std::vector<Point<T>>& vertices,
                                            const T& tol = NumTraits<T>::default_tolerance(),
                                            const T& pivot_tol = NumTraits<T>::pivot_tolerance()) {
  const auto ext = extreme_point_indices(vertices, tol, pivot_tol);
  std::vector<Point<T>> ext_points;
  for (auto i : ext) ext_points.push_back(vertices[i]);
  auto membership = hull_membership(p, ext_points, tol, pivot_tol);
  if (!membership.inside) {
    std::vector<double> point, direction;
    for (const auto& x : p) point.push_back(to_double(x));
    for (const auto& x : membership.separating_direction) direction.push_back(to_double(x));
    throw HullMembershipError("point is outside the convex hull of its vertices", std::nullopt, point, direction);
  }
  auto weights = caratheodory_reduce(ext_points, std::move(membership.weights), pivot_tol);
  ConvexCombination<T> out;
  for (std::size_t i = 0; i < ext.size(); ++i)
    if (weights[i] > T(0)) {
      out.support.push_back(ext[i]);
      out.weights.push_back(weights[i]);
    }
  return out;
}

/// Cell-wise Carathéodory decomposition s = Σ_i α_i h_i with exactly n+1
/// slots per cell; unused slots carry weight 0 and repeat the first vertex.
template <class T>
struct CaratheodoryDecomposition {
  std::size_t dim = 0;
  SimpleFunction<T> weights;                     // cells × (n+1)
  std::vector<SimpleFunction<T>> selections;     // slot i: cells × n
  std::vector<std::vector<std::size_t>> vertex;  // [slot][cell] index into T(cell)

  std::size_t slots() const { return dim + 1; }
};

template <class T>
CaratheodoryDecomposition<T> decompose_selection(const PolytopeMap<T>& map, const SimpleFunction<T>& s,
                                                 const Grid<T>& grid,
                                                 const T& tol = NumTraits<T>::default_tolerance()) {
  if (map.cell_count() != grid.size() || s.rows() != grid.size())
    throw InvalidArgument("polytope map, selection and grid must have the same cells");
  if (s.dim() != map.dim()) throw InvalidArgument("selection dimension differs from polytope dimension");
  const std::size_t n = map.dim();
  const std::size_t slots = n + 1;
  CaratheodoryDecomposition<T> out;
  out.dim = n;
  out.weights = SimpleFunction<T>::zeros(grid.size(), slots);
  out.selections.assign(slots, SimpleFunction<T>::zeros(grid.size(), n));
  out.vertex.assign(slots, std::vector<std::size_t>(grid.size(), 0));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    Point<T> point(s.at(k).begin(), s.at(k).end());
    ConvexCombination<T> combo;
    try {
      combo = caratheodory_decompose(point, map.vertices(k), tol);
    } catch (const HullMembershipError& e) {
      throw HullMembershipError("cell " + std::to_string(k) + ": selection is outside the hull of T(" +
                                    std::to_string(k) + ")",
                                k, e.point(), e.separating_direction());
    }
    for (std::size_t i = 0; i < slots; ++i) {
      const bool used = i < combo.support.size();
      const std::size_t v = used ? combo.support[i] : combo.support.front();
      out.weights(k, i) = used ? combo.weights[i] : T(0);
      out.vertex[i][k] = v;
      const auto& vert = map.vertices(k)[v];
      std::copy(vert.begin(), vert.end(), out.selections[i].at(k).begin());
    }
  }
  return out;
}

}  // namespace condbb
