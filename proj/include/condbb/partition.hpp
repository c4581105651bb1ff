#pragma once

#include "condbb/grid.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace condbb {

/// A finite sub-σ-algebra, given as a surjection from cells onto blocks.
class BlockPartition {
 public:
  /// Throws InvalidArgument unless every label in 0..max is used.
  explicit BlockPartition(std::vector<std::size_t> block_of);
  BlockPartition() = default;

  static BlockPartition trivial(std::size_t cells);
  static BlockPartition discrete(std::size_t cells);

  std::size_t cell_count() const { return labels_.size(); }
  std::size_t block_count() const { return members_.size(); }
  std::size_t block_of(std::size_t cell) const { return labels_.at(cell); }
  const std::vector<std::size_t>& labels() const { return labels_; }
  /// Cells of `block` in increasing order.
  std::span<const std::size_t> cells_in(std::size_t block) const { return members_.at(block); }

  /// True when every block of *this lies inside a single block of `coarser`.
  bool refines(const BlockPartition& coarser) const;

  friend bool operator==(const BlockPartition& a, const BlockPartition& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::size_t> labels_;
  std::vector<std::vector<std::size_t>> members_;
};

template <class T>
void require_compatible(const Grid<T>& grid, const BlockPartition& partition) {
  if (grid.size() != partition.cell_count())
    throw InvalidArgument("partition covers " + std::to_string(partition.cell_count()) + " cells, grid has " +
                          std::to_string(grid.size()));
}

/// μ(b) for every block, summed in increasing cell order.
template <class T>
std::vector<T> block_masses(const Grid<T>& grid, const BlockPartition& partition) {
  require_compatible(grid, partition);
  std::vector<T> masses(partition.block_count(), T(0));
  for (std::size_t b = 0; b < partition.block_count(); ++b)
    for (auto k : partition.cells_in(b)) masses[b] += grid.weight(k);
  return masses;
}

}  // namespace condbb
