#pragma once

#include "condbb/condexp.hpp"
#include "condbb/grid.hpp"
#include "condbb/partition.hpp"
#include "condbb/refined_set.hpp"

#include <algorithm>
#include <optional>

namespace condbb {

/// σ(𝒞 ∪ {E}) for a cell-aligned E: every block b splits into b∩E and b∩Ē,
/// empty parts dropped. New blocks are ordered by (old block, first cell),
/// so refining by a set already in 𝒞 returns 𝒞 unchanged.
template <class T>
BlockPartition refine_partition(const BlockPartition& C, const RefinedSet<T>& E, const Grid<T>& grid) {
  require_compatible(grid, C);
  const T slack = NumTraits<T>::pivot_tolerance();
  for (const auto& iv : E.intervals())
    if (iv.cell >= grid.size()) throw InvalidArgument("set references unknown cell " + std::to_string(iv.cell));
  if (!E.is_cell_aligned(grid, slack))
    throw InvalidArgument("refine_partition needs a cell-aligned set; split cells first");
  std::vector<std::size_t> labels(grid.size());
  std::size_t next = 0;
  for (std::size_t b = 0; b < C.block_count(); ++b) {
    std::optional<std::size_t> inside, outside;
    for (auto k : C.cells_in(b)) {
      auto& slot = E.mass_in(k) > T(0) ? inside : outside;
      if (!slot) slot = next++;
      labels[k] = *slot;
    }
  }
  return BlockPartition(std::move(labels));
}

/// A grid obtained by cutting cells into sub-cells, with the maps needed to
/// carry functions, partitions and sets over to it.
template <class T>
struct CellSplit {
  Grid<T> grid;
  std::vector<std::size_t> parent;  // new cell -> original cell
  std::vector<T> start;             // new cell's offset inside its parent

  SimpleFunction<T> lift(const SimpleFunction<T>& f) const {
    std::vector<T> values;
    values.reserve(grid.size() * f.dim());
    for (auto p : parent) {
      auto row = f.at(p);
      values.insert(values.end(), row.begin(), row.end());
    }
    return SimpleFunction<T>(grid.size(), f.dim(), std::move(values));
  }

  BlockPartition lift(const BlockPartition& C) const {
    std::vector<std::size_t> labels;
    labels.reserve(parent.size());
    for (auto p : parent) labels.push_back(C.block_of(p));
    return BlockPartition(std::move(labels));
  }

  RefinedSet<T> lift(const RefinedSet<T>& E) const {
    std::vector<Interval<T>> parts;
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const T lo_cell = start[c];
      const T hi_cell = start[c] + grid.weight(c);
      for (const auto& iv : E.in_cell(parent[c])) {
        const T lo = std::max(iv.offset, lo_cell);
        const T hi = std::min(iv.end(), hi_cell);
        if (lo < hi) parts.push_back({c, lo - lo_cell, hi == hi_cell ? grid.weight(c) : hi - lo_cell});
      }
    }
    return RefinedSet<T>::from_intervals(grid, std::move(parts));
  }

  /// Sub-cells of original cell `p`, in order.
  std::vector<std::size_t> children(std::size_t p) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < parent.size(); ++c)
      if (parent[c] == p) out.push_back(c);
    return out;
  }
};

namespace detail {

template <class T>
CellSplit<T> split_at_cuts(const Grid<T>& grid, const std::vector<std::vector<T>>& cuts) {
  std::vector<T> weights;
  CellSplit<T> out{grid, {}, {}};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<T> points = cuts[k];
    points.push_back(T(0));
    points.push_back(grid.weight(k));
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      const T w = i + 2 == points.size() && i == 0 ? grid.weight(k) : points[i + 1] - points[i];
      weights.push_back(w);
      out.parent.push_back(k);
      out.start.push_back(points[i]);
    }
  }
  out.grid = Grid<T>::from_normalized(std::move(weights), grid.mode());
  return out;
}

}  // namespace detail

/// Cuts every cell at the interval ends of the given sets, so each of them
/// becomes cell-aligned on the returned grid.
template <class T>
CellSplit<T> split_cells(const Grid<T>& grid, std::span<const RefinedSet<T>> sets) {
  std::vector<std::vector<T>> cuts(grid.size());
  for (const auto& set : sets)
    for (const auto& iv : set.intervals()) {
      if (iv.cell >= grid.size()) throw InvalidArgument("set references unknown cell " + std::to_string(iv.cell));
      if (iv.offset > T(0)) cuts[iv.cell].push_back(iv.offset);
      if (iv.end() < grid.weight(iv.cell)) cuts[iv.cell].push_back(iv.end());
    }
  return detail::split_at_cuts(grid, cuts);
}

template <class T>
CellSplit<T> split_cells(const Grid<T>& grid, std::initializer_list<RefinedSet<T>> sets) {
  return split_cells(grid, std::span<const RefinedSet<T>>(sets.begin(), sets.size()));
}

/// Cuts every cell into `parts` equal sub-cells.
template <class T>
CellSplit<T> subdivide(const Grid<T>& grid, std::size_t parts) {
  if (parts == 0) throw InvalidArgument("subdivide needs at least one part");
  std::vector<std::vector<T>> cuts(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (std::size_t i = 1; i < parts; ++i) cuts[k].push_back(grid.weight(k) * T(i) / T(parts));
  return detail::split_at_cuts(grid, cuts);
}

template <class T>
struct CoarsenessVerdict {
  bool is_coarser = false;
  RefinedSet<T> queried;                   // E
  RefinedSet<T> witness;                   // E₀ ⊂ E, or an obstructing atom
  BlockFunction<T> witness_conditional;    // μ(witness|𝒞)
  BlockFunction<T> queried_conditional;    // μ(E|𝒞)
};

/// Is 𝒞 μ-coarser than the cell σ-algebra, as seen from E (Ω by default)?
/// Splittable grids always are: the left half of E in every cell satisfies
/// 0 < μ(E₀|𝒞) = μ(E|𝒞)/2 < μ(E|𝒞) wherever E has mass. Atomic grids never
/// are; the witness is a minimal-weight cell.
template <class T>
CoarsenessVerdict<T> coarseness_check(const Grid<T>& grid, const BlockPartition& C,
                                      const std::optional<RefinedSet<T>>& queried = std::nullopt) {
  require_compatible(grid, C);
  CoarsenessVerdict<T> verdict;
  verdict.queried = queried ? *queried : RefinedSet<T>::whole(grid);
  if (!(verdict.queried.total_mass() > T(0))) throw PreconditionError("queried set has zero mass");
  if (grid.mode() == SpaceMode::Splittable) {
    verdict.is_coarser = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const T m = verdict.queried.mass_in(k);
      if (m > T(0)) verdict.witness = verdict.witness.unite(verdict.queried.carve(k, T(0), m / T(2)));
    }
  } else {
    std::size_t atom = 0;
    for (std::size_t k = 1; k < grid.size(); ++k)
      if (grid.weight(k) < grid.weight(atom)) atom = k;
    verdict.is_coarser = false;
    verdict.witness = RefinedSet<T>::of_cells(grid, {atom});
  }
  verdict.witness_conditional = ce_measure(verdict.witness, C, grid);
  verdict.queried_conditional = ce_measure(verdict.queried, C, grid);
  return verdict;
}

/// Checks a user-supplied witness: E₀ ⊆ E and 0 < μ(E₀|𝒞) < μ(E|𝒞) on at
/// least one block.
template <class T>
bool validate_witness(const Grid<T>& grid, const BlockPartition& C, const RefinedSet<T>& E,
                      const RefinedSet<T>& E0, const T& tol = NumTraits<T>::default_tolerance()) {
  if (!E.contains(E0, tol)) return false;
  const auto lo = ce_measure(E0, C, grid);
  const auto hi = ce_measure(E, C, grid);
  for (std::size_t b = 0; b < C.block_count(); ++b)
    if (lo(b, 0) > tol && lo(b, 0) < hi(b, 0) - tol) return true;
  return false;
}

}  // namespace condbb
