#pragma once

// Brute-force references, written independently of condexp and lyapunov:
// different summation order, no shared helpers beyond the data types.

#include "condbb/partition.hpp"
#include "condbb/refined_set.hpp"
#include "condbb/simple_function.hpp"

#include <cstdint>
#include <vector>

namespace condbb::oracle {

/// E(f·χ_E|𝒞), summing cells from last to first and intervals one by one.
template <class T>
BlockFunction<T> direct_integrate(const SimpleFunction<T>& f, const RefinedSet<T>& E, const BlockPartition& C,
                                  const Grid<T>& grid) {
  if (f.rows() != grid.size() || C.cell_count() != grid.size())
    throw InvalidArgument("direct_integrate: shapes do not match the grid");
  const std::size_t d = f.dim();
  std::vector<T> numer(C.block_count() * d, T(0));
  std::vector<T> denom(C.block_count(), T(0));
  for (std::size_t k = grid.size(); k-- > 0;) denom[C.block_of(k)] += grid.weight(k);
  const auto parts = E.intervals();
  for (std::size_t n = parts.size(); n-- > 0;) {
    const auto& iv = parts[n];
    const std::size_t b = C.block_of(iv.cell);
    for (std::size_t j = 0; j < d; ++j) numer[b * d + j] += iv.length() * f(iv.cell, j);
  }
  for (std::size_t b = 0; b < C.block_count(); ++b)
    for (std::size_t j = 0; j < d; ++j) numer[b * d + j] /= denom[b];
  return BlockFunction<T>(C.block_count(), d, std::move(numer));
}

/// E(f|𝒞) of the piecewise function equal to values[i] on pieces[i].
template <class T>
BlockFunction<T> direct_integrate(const std::vector<SimpleFunction<T>>& values, const std::vector<RefinedSet<T>>& pieces,
                                  const BlockPartition& C, const Grid<T>& grid) {
  if (values.size() != pieces.size() || values.empty())
    throw InvalidArgument("direct_integrate: one value function per piece expected");
  auto total = direct_integrate(values.back(), pieces.back(), C, grid);
  for (std::size_t i = values.size() - 1; i-- > 0;) total += direct_integrate(values[i], pieces[i], C, grid);
  return total;
}

template <class T>
struct Enumeration {
  std::vector<std::size_t> assignment;  // piece of every cell
  T residual = T(0);                    // max over (piece, block, coordinate)
  std::uint64_t visited = 0;
};

/// Exhaustive search over all ways to give every atom to one piece,
/// minimizing max_{i,b,j} |E(χ_{B_i} h_j|𝒞) − E(α_i h_j|𝒞)|. Blocks are
/// independent, so each is searched on its own; the budget caps p^m.
template <class T>
Enumeration<T> enumerate_atomic_partitions(const Grid<T>& grid, std::size_t pieces, const SimpleFunction<T>& h,
                                           const SimpleFunction<T>& alpha, const BlockPartition& C,
                                           std::uint64_t budget = std::uint64_t{1} << 24) {
  if (pieces == 0 || alpha.dim() != pieces) throw InvalidArgument("alpha must have one column per piece");
  if (h.rows() != grid.size() || alpha.rows() != grid.size() || C.cell_count() != grid.size())
    throw InvalidArgument("enumeration: shapes do not match the grid");
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (total > budget / pieces) throw InvalidArgument("enumeration budget exceeded");
    total *= pieces;
  }
  const std::size_t D = h.dim();
  Enumeration<T> out;
  out.assignment.assign(grid.size(), 0);
  for (std::size_t b = 0; b < C.block_count(); ++b) {
    const auto cells = C.cells_in(b);
    T mass(0);
    for (auto k : cells) mass += grid.weight(k);
    // target[i][j] = Σ_k α_i(k) w_k h_j(k), kept unnormalized.
    std::vector<T> target(pieces * D, T(0));
    for (auto k : cells)
      for (std::size_t i = 0; i < pieces; ++i)
        for (std::size_t j = 0; j < D; ++j) target[i * D + j] += alpha(k, i) * grid.weight(k) * h(k, j);
    std::vector<T> sums(pieces * D, T(0));
    std::vector<std::size_t> choice(cells.size(), 0);
    std::vector<std::size_t> best_choice;
    T best(0);
    bool have = false;
    // Depth-first over cells with running moment sums.
    auto recurse = [&](auto&& self, std::size_t depth) -> void {
      if (depth == cells.size()) {
        ++out.visited;
        T worst(0);
        for (std::size_t n = 0; n < sums.size(); ++n) worst = std::max(worst, abs_value(sums[n] - target[n]));
        if (!have || worst < best) {
          best = worst;
          best_choice = choice;
          have = true;
        }
        return;
      }
      const std::size_t k = cells[depth];
      for (std::size_t i = 0; i < pieces; ++i) {
        for (std::size_t j = 0; j < D; ++j) sums[i * D + j] += grid.weight(k) * h(k, j);
        choice[depth] = i;
        self(self, depth + 1);
        for (std::size_t j = 0; j < D; ++j) sums[i * D + j] -= grid.weight(k) * h(k, j);
      }
    };
    recurse(recurse, 0);
    for (std::size_t n = 0; n < cells.size(); ++n) out.assignment[cells[n]] = best_choice[n];
    out.residual = std::max(out.residual, best / mass);
  }
  return out;
}

}  // namespace condbb::oracle
