#include "condbb/partition.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace condbb {

BlockPartition::BlockPartition(std::vector<std::size_t> block_of) : labels_(std::move(block_of)) {
  if (labels_.empty()) throw InvalidArgument("partition needs at least one cell");
  const std::size_t count = *std::max_element(labels_.begin(), labels_.end()) + 1;
  members_.resize(count);
  for (std::size_t k = 0; k < labels_.size(); ++k) members_[labels_[k]].push_back(k);
  for (std::size_t b = 0; b < count; ++b)
    if (members_[b].empty()) throw InvalidArgument("block " + std::to_string(b) + " has no cells");
}

BlockPartition BlockPartition::trivial(std::size_t cells) {
  return BlockPartition(std::vector<std::size_t>(cells, 0));
}

BlockPartition BlockPartition::discrete(std::size_t cells) {
  std::vector<std::size_t> labels(cells);
  std::iota(labels.begin(), labels.end(), std::size_t{0});
  return BlockPartition(std::move(labels));
}

bool BlockPartition::refines(const BlockPartition& coarser) const {
  if (coarser.cell_count() != cell_count()) return false;
  for (const auto& block : members_)
    for (auto k : block)
      if (coarser.block_of(k) != coarser.block_of(block.front())) return false;
  return true;
}

}  // namespace condbb
