#pragma once

#include "condbb/grid.hpp"

#include <algorithm>
#include <span>
#include <vector>

namespace condbb {

/// The sub-interval [offset, stop) of a cell, offsets relative to the
/// cell's left end. Endpoints are stored, not lengths, so that adjacent
/// intervals share an endpoint exactly in floating point too.
template <class T>
struct Interval {
  std::size_t cell;
  T offset;
  T stop;

  static Interval sized(std::size_t cell, const T& offset, const T& length) { return {cell, offset, offset + length}; }
  T length() const { return stop - offset; }
  T end() const { return stop; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A measurable set at sub-cell resolution: finitely many disjoint
/// sub-intervals per cell. Kept sorted by (cell, offset) with touching
/// intervals merged, so equal sets compare equal.
template <class T>
class RefinedSet {
 public:
  RefinedSet() = default;

  static RefinedSet whole(const Grid<T>& grid) {
    RefinedSet set;
    for (std::size_t k = 0; k < grid.size(); ++k) set.intervals_.push_back({k, T(0), grid.weight(k)});
    return set;
  }

  static RefinedSet of_cells(const Grid<T>& grid, std::span<const std::size_t> cells) {
    std::vector<Interval<T>> parts;
    for (auto k : cells) {
      if (k >= grid.size()) throw InvalidArgument("set references unknown cell " + std::to_string(k));
      parts.push_back({k, T(0), grid.weight(k)});
    }
    return from_intervals(grid, std::move(parts));
  }

  static RefinedSet of_cells(const Grid<T>& grid, std::initializer_list<std::size_t> cells) {
    return of_cells(grid, std::span<const std::size_t>(cells.begin(), cells.size()));
  }

  /// Validates and canonicalizes. Float noise up to a few ulps of the cell
  /// weight (plus `slack`) at interval ends is clamped; anything beyond it
  /// is an error.
  static RefinedSet from_intervals(const Grid<T>& grid, std::vector<Interval<T>> parts, const T& slack = T(0)) {
    for (auto& iv : parts) {
      if (iv.cell >= grid.size()) throw InvalidArgument("set references unknown cell " + std::to_string(iv.cell));
      if (!is_finite(iv.offset) || !is_finite(iv.stop)) throw InvalidArgument("non-finite set interval");
      const T& w = grid.weight(iv.cell);
      const T noise = slack + NumTraits<T>::rounding(w);
      if (iv.offset < T(0)) {
        if (iv.offset < -noise) throw InvalidArgument("negative offset in cell " + std::to_string(iv.cell));
        iv.offset = T(0);
      }
      if (iv.stop < iv.offset - noise) throw InvalidArgument("negative mass in cell " + std::to_string(iv.cell));
      if (iv.stop > w) {
        if (iv.stop > w + noise) throw InvalidArgument("interval exceeds cell " + std::to_string(iv.cell) + " weight");
        iv.stop = w;
      }
    }
    std::erase_if(parts, [](const Interval<T>& iv) { return !(iv.stop > iv.offset); });
    std::sort(parts.begin(), parts.end(), [](const Interval<T>& a, const Interval<T>& b) {
      return a.cell != b.cell ? a.cell < b.cell : a.offset < b.offset;
    });
    RefinedSet set;
    for (auto& iv : parts) {
      if (!set.intervals_.empty() && set.intervals_.back().cell == iv.cell) {
        auto& last = set.intervals_.back();
        const T noise = slack + NumTraits<T>::rounding(grid.weight(iv.cell));
        if (iv.offset < last.stop) {
          if (iv.offset < last.stop - noise)
            throw InvalidArgument("overlapping intervals in cell " + std::to_string(iv.cell));
          iv.offset = last.stop;
          if (!(iv.stop > iv.offset)) continue;
        }
        if (iv.offset == last.stop) {
          last.stop = iv.stop;
          continue;
        }
      }
      set.intervals_.push_back(iv);
    }
    return set;
  }

  std::span<const Interval<T>> intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }

  /// The intervals lying in `cell`.
  std::span<const Interval<T>> in_cell(std::size_t cell) const {
    auto lo = std::lower_bound(intervals_.begin(), intervals_.end(), cell,
                               [](const Interval<T>& iv, std::size_t c) { return iv.cell < c; });
    auto hi = std::upper_bound(lo, intervals_.end(), cell,
                               [](std::size_t c, const Interval<T>& iv) { return c < iv.cell; });
    return {lo, hi};
  }

  T mass_in(std::size_t cell) const {
    T total(0);
    for (const auto& iv : in_cell(cell)) total += iv.length();
    return total;
  }

  std::vector<T> cell_masses(std::size_t cells) const {
    std::vector<T> masses(cells, T(0));
    for (const auto& iv : intervals_) {
      if (iv.cell >= cells) throw InvalidArgument("set references unknown cell " + std::to_string(iv.cell));
      masses[iv.cell] += iv.length();
    }
    return masses;
  }

  T total_mass() const {
    T total(0);
    for (const auto& iv : intervals_) total += iv.length();
    return total;
  }

  /// Every cell is either untouched or fully covered (up to `slack` relative
  /// to the cell weight).
  bool is_cell_aligned(const Grid<T>& grid, const T& relative_slack = T(0)) const {
    for (const auto& iv : intervals_) {
      if (iv.cell >= grid.size()) return false;
      const T& w = grid.weight(iv.cell);
      if (abs_value(mass_in(iv.cell) - w) > relative_slack * w) return false;
    }
    return true;
  }

  RefinedSet intersect(const RefinedSet& other) const {
    RefinedSet out;
    auto a = intervals_.begin();
    auto b = other.intervals_.begin();
    while (a != intervals_.end() && b != other.intervals_.end()) {
      if (a->cell != b->cell) {
        (a->cell < b->cell ? ++a : ++b);
        continue;
      }
      const T lo = std::max(a->offset, b->offset);
      const T hi = std::min(a->end(), b->end());
      if (lo < hi) out.intervals_.push_back({a->cell, lo, hi});
      (a->end() < b->end() ? ++a : ++b);
    }
    return out;
  }

  RefinedSet complement(const Grid<T>& grid) const {
    std::vector<Interval<T>> parts;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      T cursor(0);
      for (const auto& iv : in_cell(k)) {
        if (cursor < iv.offset) parts.push_back({k, cursor, iv.offset});
        cursor = iv.end();
      }
      if (cursor < grid.weight(k)) parts.push_back({k, cursor, grid.weight(k)});
    }
    RefinedSet out;
    out.intervals_ = std::move(parts);
    return out;
  }

  RefinedSet unite(const RefinedSet& other) const {
    std::vector<Interval<T>> parts(intervals_);
    parts.insert(parts.end(), other.intervals_.begin(), other.intervals_.end());
    std::sort(parts.begin(), parts.end(), [](const Interval<T>& a, const Interval<T>& b) {
      return a.cell != b.cell ? a.cell < b.cell : a.offset < b.offset;
    });
    RefinedSet out;
    for (const auto& iv : parts) {
      if (!out.intervals_.empty() && out.intervals_.back().cell == iv.cell &&
          !(iv.offset > out.intervals_.back().end())) {
        auto& last = out.intervals_.back();
        if (iv.stop > last.stop) last.stop = iv.stop;
        continue;
      }
      out.intervals_.push_back(iv);
    }
    return out;
  }

  /// other ⊆ *this, allowing gaps of at most `slack`.
  bool contains(const RefinedSet& other, const T& slack = T(0)) const {
    for (const auto& iv : other.intervals_) {
      T cursor = iv.offset;
      for (const auto& mine : in_cell(iv.cell)) {
        if (mine.end() <= cursor) continue;
        if (mine.offset > cursor + slack) break;
        cursor = std::max(cursor, mine.end());
        if (!(cursor < iv.end())) break;
      }
      if (cursor < iv.end() - slack) return false;
    }
    return true;
  }

  /// The part of this set inside `cell` lying between cumulative masses
  /// `from` and `from + length`, scanning intervals left to right.
  RefinedSet carve(std::size_t cell, const T& from, const T& length) const {
    RefinedSet out;
    if (!(length > T(0))) return out;
    const T to = from + length;
    T seen(0);
    for (const auto& iv : in_cell(cell)) {
      const T next = seen + iv.length();
      const T lo = std::max(from, seen);
      const T hi = std::min(to, next);
      if (lo < hi) {
        const T start = iv.offset + (lo - seen);
        const T stop = hi == next ? iv.end() : std::min(iv.end(), iv.offset + (hi - seen));
        if (start < stop) out.intervals_.push_back({cell, start, stop});
      }
      seen = next;
      if (!(seen < to)) break;
    }
    return out;
  }

  friend bool operator==(const RefinedSet& a, const RefinedSet& b) { return a.intervals_ == b.intervals_; }

 private:
  std::vector<Interval<T>> intervals_;
};

/// Disjoint union of sets with no common cells or with non-overlapping parts.
template <class T>
RefinedSet<T> unite_all(std::span<const RefinedSet<T>> sets) {
  RefinedSet<T> out;
  for (const auto& s : sets) out = out.unite(s);
  return out;
}

}  // namespace condbb
