#pragma once

// Random problem generators shared by the unit, property and acceptance
// tests. All data is drawn as small integers or ratios of small integers,
// so every instance has an exact rational twin.

#include "condbb/oracle.hpp"
#include "condbb/purify.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace condbb::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

template <class T>
T ratio(int num, int den) {
  return T(num) / T(den);
}

template <class T>
Grid<T> random_grid(Rng& rng, std::size_t cells, SpaceMode mode, int max_weight = 20) {
  std::vector<T> w;
  for (std::size_t k = 0; k < cells; ++k) w.push_back(T(uniform_int(rng, 1, max_weight)));
  return Grid<T>::build(w, mode);
}

inline BlockPartition random_partition(Rng& rng, std::size_t cells, std::size_t max_blocks) {
  const std::size_t blocks = uniform_index(rng, 1, std::min(cells, max_blocks));
  std::vector<std::size_t> labels(cells);
  for (std::size_t k = 0; k < cells; ++k) labels[k] = k < blocks ? k : uniform_index(rng, 0, blocks - 1);
  std::shuffle(labels.begin(), labels.end(), rng);
  return BlockPartition(std::move(labels));
}

/// Entries are multiples of 1/4 in [-lim, lim].
template <class T>
SimpleFunction<T> random_function(Rng& rng, std::size_t cells, std::size_t dim, int lim = 10) {
  std::vector<T> v;
  for (std::size_t i = 0; i < cells * dim; ++i) v.push_back(ratio<T>(uniform_int(rng, -4 * lim, 4 * lim), 4));
  return SimpleFunction<T>(cells, dim, std::move(v));
}

/// Per cell: nothing, everything, or one or two sub-intervals cut at
/// eighths of the cell.
template <class T>
RefinedSet<T> random_set(Rng& rng, const Grid<T>& grid) {
  std::vector<Interval<T>> parts;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const T w = grid.weight(k);
    switch (uniform_int(rng, 0, 3)) {
      case 0:
        break;
      case 1:
        parts.push_back({k, T(0), w});
        break;
      case 2: {
        const int a = uniform_int(rng, 0, 7);
        const int b = uniform_int(rng, a + 1, 8);
        parts.push_back({k, w * ratio<T>(a, 8), w * ratio<T>(b, 8)});
        break;
      }
      default:
        parts.push_back({k, T(0), w * ratio<T>(2, 8)});
        parts.push_back({k, w * ratio<T>(5, 8), w * ratio<T>(7, 8)});
    }
  }
  return RefinedSet<T>::from_intervals(grid, std::move(parts));
}

/// Aligned sets take whole cells only.
template <class T>
RefinedSet<T> random_cells(Rng& rng, const Grid<T>& grid, bool nonempty = true) {
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (uniform_int(rng, 0, 1)) cells.push_back(k);
  if (cells.empty() && nonempty) cells.push_back(uniform_index(rng, 0, grid.size() - 1));
  return RefinedSet<T>::of_cells(grid, std::span<const std::size_t>(cells));
}

/// Rows of p nonnegative weights summing to one; some entries are zero.
template <class T>
SimpleFunction<T> random_alpha(Rng& rng, std::size_t cells, std::size_t pieces) {
  std::vector<T> v;
  for (std::size_t k = 0; k < cells; ++k) {
    std::vector<int> raw(pieces);
    int sum = 0;
    for (auto& r : raw) sum += (r = uniform_int(rng, 0, 4));
    if (sum == 0) sum = raw[uniform_index(rng, 0, pieces - 1)] = 1;
    for (auto r : raw) v.push_back(ratio<T>(r, sum));
  }
  return SimpleFunction<T>(cells, pieces, std::move(v));
}

template <class T>
struct PolytopeInstance {
  Grid<T> grid;
  BlockPartition partition;
  PolytopeMap<T> map;
  SimpleFunction<T> selection;
};

/// Vertices are points of the half-integer lattice in [-5,5]^n; the
/// selection is a random convex combination of them.
template <class T>
PolytopeInstance<T> random_polytope_instance(Rng& rng, std::size_t cells, std::size_t dim, std::size_t max_vertices,
                                             std::size_t max_blocks, SpaceMode mode) {
  auto grid = random_grid<T>(rng, cells, mode);
  auto C = random_partition(rng, cells, max_blocks);
  std::vector<std::vector<Point<T>>> vertices(cells);
  std::vector<T> sel;
  for (std::size_t k = 0; k < cells; ++k) {
    const std::size_t count = uniform_index(rng, 1, max_vertices);
    std::vector<int> mix(count);
    int total = 0;
    for (auto& m : mix) total += (m = uniform_int(rng, 0, 5));
    if (total == 0) total = mix[0] = 1;
    Point<T> s(dim, T(0));
    for (std::size_t q = 0; q < count; ++q) {
      Point<T> v;
      for (std::size_t j = 0; j < dim; ++j) v.push_back(ratio<T>(uniform_int(rng, -10, 10), 2));
      for (std::size_t j = 0; j < dim; ++j) s[j] += ratio<T>(mix[q], total) * v[j];
      vertices[k].push_back(std::move(v));
    }
    sel.insert(sel.end(), s.begin(), s.end());
  }
  return {std::move(grid), std::move(C), PolytopeMap<T>(dim, std::move(vertices)),
          SimpleFunction<T>(cells, dim, std::move(sel))};
}

template <class T>
struct YoungInstance {
  Grid<T> grid;
  BlockPartition partition;
  YoungMeasure<T> delta;
  IntegrandFamily<T> V;
};

template <class T>
YoungInstance<T> random_young_instance(Rng& rng, std::size_t cells, std::size_t actions, std::size_t dim,
                                       std::size_t max_blocks, SpaceMode mode) {
  auto grid = random_grid<T>(rng, cells, mode);
  auto C = random_partition(rng, cells, max_blocks);
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < actions; ++a) labels.push_back("a" + std::to_string(a));
  auto probs = random_alpha<T>(rng, cells, actions);
  std::vector<std::vector<Point<T>>> values(cells);
  for (std::size_t k = 0; k < cells; ++k)
    for (std::size_t a = 0; a < actions; ++a) {
      Point<T> v;
      for (std::size_t j = 0; j < dim; ++j) v.push_back(ratio<T>(uniform_int(rng, -8, 8), 2));
      values[k].push_back(std::move(v));
    }
  return {std::move(grid), std::move(C), YoungMeasure<T>(std::move(labels), std::move(probs)),
          IntegrandFamily<T>(dim, std::move(values))};
}

/// A refinement of C: every block split further at random.
inline BlockPartition random_refinement(Rng& rng, const BlockPartition& C) {
  std::vector<std::size_t> labels(C.cell_count());
  std::size_t next = 0;
  for (std::size_t b = 0; b < C.block_count(); ++b) {
    const auto cells = C.cells_in(b);
    const std::size_t parts = uniform_index(rng, 1, cells.size());
    std::vector<std::size_t> sub(cells.size());
    for (std::size_t n = 0; n < cells.size(); ++n) sub[n] = n < parts ? n : uniform_index(rng, 0, parts - 1);
    std::shuffle(sub.begin(), sub.end(), rng);
    for (std::size_t n = 0; n < cells.size(); ++n) labels[cells[n]] = next + sub[n];
    next += parts;
  }
  return BlockPartition(std::move(labels));
}

}  // namespace condbb::testing
