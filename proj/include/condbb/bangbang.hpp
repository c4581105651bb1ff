#pragma once

// Extreme-point selections with the same conditional expectation as a
// given selection: decompose h = Σ α_i h_i into vertex selections, find
// pieces B_i with E(χ_{B_i} h_j|𝒞) = E(α_i h_j|𝒞), and glue f = h_i on B_i.

#include "condbb/lyapunov.hpp"
#include "condbb/polytope.hpp"

namespace condbb {

/// f = values[i] on pieces[i]; piece i comes from Carathéodory slot i and
/// is kept even when empty.
template <class T>
struct ExtremeSelection {
  std::vector<RefinedSet<T>> pieces;
  std::vector<SimpleFunction<T>> values;        // per piece, cells × n
  std::vector<std::vector<std::size_t>> vertex;  // [piece][cell] index into the cell's vertex list
};

template <class T>
struct BangBangResult {
  CaratheodoryDecomposition<T> decomposition;
  // Moments (h_1, …, h_{n+1}) stacked, all (i, j) pairs. With diagonal_only
  // these pairs are reported but not matched, and residual_bound stays 0.
  PartitionResult<T> partition;
  ExtremeSelection<T> selection;
  BlockFunction<T> selection_side;  // E(f|𝒞)
  BlockFunction<T> original_side;   // E(h|𝒞)
  T max_deviation = T(0);
  T bound = T(0);
  bool diagonal_only = false;
};

namespace detail {

// c(k,i) = h_i(k): only Σ_i E(χ_{B_i} h_i|𝒞) is matched, with n rows.
template <class T>
MomentSystem<T> diagonal_moments(const CaratheodoryDecomposition<T>& dec, const Grid<T>& grid) {
  MomentSystem<T> sys;
  sys.pieces = dec.slots();
  sys.rows = dec.dim;
  sys.omega.assign(grid.weights().begin(), grid.weights().end());
  sys.alpha = dec.weights;
  sys.coef.assign(grid.size() * sys.pieces * sys.rows, T(0));
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (std::size_t i = 0; i < sys.pieces; ++i)
      for (std::size_t j = 0; j < sys.rows; ++j)
        sys.coef[(k * sys.pieces + i) * sys.rows + j] = dec.selections[i](k, j);
  return sys;
}

template <class T>
SimpleFunction<T> stack_columns(const std::vector<SimpleFunction<T>>& parts) {
  const std::size_t rows = parts.front().rows();
  std::size_t dim = 0;
  for (const auto& p : parts) dim += p.dim();
  std::vector<T> values;
  values.reserve(rows * dim);
  for (std::size_t k = 0; k < rows; ++k)
    for (const auto& p : parts) values.insert(values.end(), p.at(k).begin(), p.at(k).end());
  return SimpleFunction<T>(rows, dim, std::move(values));
}

}  // namespace detail

/// Splittable grids: E(f|𝒞) = E(h|𝒞) up to float rounding. Atomic grids:
/// within (n+1)·p·D·w_max·H_max/min μ(b), or 2·n·w_max·H_max/min μ(b) when
/// only the diagonal moments are matched.
template <class T>
BangBangResult<T> bang_bang(const PolytopeMap<T>& map, const SimpleFunction<T>& h, const BlockPartition& C,
                            const Grid<T>& grid, const T& tol = NumTraits<T>::default_tolerance(),
                            bool diagonal_only = false) {
  require_compatible(grid, C);
  BangBangResult<T> out;
  out.diagonal_only = diagonal_only;
  out.decomposition = decompose_selection(map, h, grid, tol);
  const auto& dec = out.decomposition;
  const std::size_t n = dec.dim;
  const std::size_t slots = dec.slots();
  const auto stacked = detail::stack_columns(dec.selections);
  const T pivot_tol = NumTraits<T>::pivot_tolerance();
  const auto whole = RefinedSet<T>::whole(grid);
  const T h_max = max_abs(stacked);

  if (diagonal_only) {
    const auto sys = detail::diagonal_moments(dec, grid);
    out.partition = detail::assemble(whole, stacked, dec.weights, C, grid, detail::solve(sys, C, grid, pivot_tol));
  } else {
    out.partition = lyapunov_partition(stacked, dec.weights, C, grid, tol, pivot_tol);
  }

  out.selection.pieces = out.partition.pieces;
  out.selection.values = dec.selections;
  out.selection.vertex = dec.vertex;

  out.original_side = cond_exp(h, C, grid);
  out.selection_side = BlockFunction<T>::zeros(C.block_count(), n);
  for (std::size_t i = 0; i < slots; ++i)
    out.selection_side += weighted_ce_measure(dec.selections[i], out.selection.pieces[i], C, grid);
  out.max_deviation = max_abs_difference(out.selection_side, out.original_side);

  if (grid.mode() == SpaceMode::Splittable) {
    out.bound = tol;
  } else {
    const T scale = grid.max_weight() * h_max / detail::min_block_mass(grid, C);
    out.bound = diagonal_only ? T(2) * T(n) * scale : T(slots) * out.partition.residual_bound;
  }
  return out;
}

/// bang_bang on the convex hulls of finite point sets; the output only
/// takes values among the extreme points, hence inside the sets themselves.
template <class T>
BangBangResult<T> pointset_bang_bang(const std::vector<std::vector<Point<T>>>& points, const SimpleFunction<T>& s,
                                     const BlockPartition& C, const Grid<T>& grid,
                                     const T& tol = NumTraits<T>::default_tolerance(), bool diagonal_only = false) {
  return bang_bang(PolytopeMap<T>(s.dim(), points), s, C, grid, tol, diagonal_only);
}

/// bang_bang with the trivial partition: ∫ f dμ = ∫ h dμ.
template <class T>
BangBangResult<T> integral_bang_bang(const PolytopeMap<T>& map, const SimpleFunction<T>& h, const Grid<T>& grid,
                                     const T& tol = NumTraits<T>::default_tolerance()) {
  return bang_bang(map, h, BlockPartition::trivial(grid.size()), grid, tol);
}

}  // namespace condbb
