#pragma once

// Conditional expectations of simple functions and the vector measures
// G_𝒞(E) = E(χ_E|𝒞), fG_𝒞(E) = E(fχ_E|𝒞). Every block is summed in
// increasing cell order, so results do not depend on evaluation order.

#include "condbb/partition.hpp"
#include "condbb/refined_set.hpp"
#include "condbb/simple_function.hpp"

namespace condbb {

namespace detail {

template <class T>
void require_on_grid(const SimpleFunction<T>& f, const Grid<T>& grid) {
  if (f.rows() != grid.size())
    throw InvalidArgument("function has " + std::to_string(f.rows()) + " cells, grid has " +
                          std::to_string(grid.size()));
}

// Σ_k f(k)·mass(k) per block, divided by μ(b).
template <class T>
BlockFunction<T> block_average(const SimpleFunction<T>& f, const std::vector<T>& mass, const BlockPartition& C,
                               const Grid<T>& grid) {
  const auto mu = block_masses(grid, C);
  auto out = BlockFunction<T>::zeros(C.block_count(), f.dim());
  for (std::size_t b = 0; b < C.block_count(); ++b) {
    auto row = out.at(b);
    for (auto k : C.cells_in(b)) {
      if (mass[k] == T(0)) continue;
      for (std::size_t j = 0; j < f.dim(); ++j) row[j] += f(k, j) * mass[k];
    }
    for (auto& v : row) v /= mu[b];
  }
  return out;
}

}  // namespace detail

/// E(f|𝒞): per block the μ-weighted mean of f.
template <class T>
BlockFunction<T> cond_exp(const SimpleFunction<T>& f, const BlockPartition& C, const Grid<T>& grid) {
  detail::require_on_grid(f, grid);
  require_compatible(grid, C);
  return detail::block_average(f, std::vector<T>(grid.weights().begin(), grid.weights().end()), C, grid);
}

/// G_𝒞(E) = E(χ_E|𝒞) = μ(E∩b)/μ(b).
template <class T>
BlockFunction<T> ce_measure(const RefinedSet<T>& E, const BlockPartition& C, const Grid<T>& grid) {
  require_compatible(grid, C);
  return detail::block_average(SimpleFunction<T>::constant(grid.size(), {T(1)}), E.cell_masses(grid.size()), C,
                               grid);
}

/// fG_𝒞(E) = E(fχ_E|𝒞); sub-cell masses of E multiply the cell value of f.
template <class T>
BlockFunction<T> weighted_ce_measure(const SimpleFunction<T>& f, const RefinedSet<T>& E, const BlockPartition& C,
                                     const Grid<T>& grid) {
  detail::require_on_grid(f, grid);
  require_compatible(grid, C);
  return detail::block_average(f, E.cell_masses(grid.size()), C, grid);
}

/// ∫_E g dfG_𝒞 = E(g·f·χ_E|𝒞) for a scalar, cell-wise constant g.
template <class T>
BlockFunction<T> integrate_against(const SimpleFunction<T>& g, const SimpleFunction<T>& f, const RefinedSet<T>& E,
                                   const BlockPartition& C, const Grid<T>& grid) {
  if (g.dim() != 1) throw InvalidArgument("integrand g must be scalar");
  detail::require_on_grid(g, grid);
  return weighted_ce_measure(scale_by(g, f), E, C, grid);
}

/// A 𝒞-measurable function seen as a cell function.
template <class T>
SimpleFunction<T> lift(const BlockFunction<T>& values, const BlockPartition& C) {
  if (values.rows() != C.block_count()) throw InvalidArgument("block function does not match partition");
  auto out = SimpleFunction<T>::zeros(C.cell_count(), values.dim());
  for (std::size_t k = 0; k < C.cell_count(); ++k) {
    auto src = values.at(C.block_of(k));
    std::copy(src.begin(), src.end(), out.at(k).begin());
  }
  return out;
}

}  // namespace condbb
