#pragma once

#include "condbb/errors.hpp"
#include "condbb/scalar.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace condbb {

/// Splittable cells are sub-dividable intervals of [0,1); atomic cells are
/// indivisible atoms.
enum class SpaceMode { Splittable, Atomic };

inline std::string_view to_string(SpaceMode mode) {
  return mode == SpaceMode::Splittable ? "splittable" : "atomic";
}

inline SpaceMode parse_space_mode(std::string_view text) {
  if (text == "splittable") return SpaceMode::Splittable;
  if (text == "atomic") return SpaceMode::Atomic;
  throw InvalidArgument("unknown space mode '" + std::string(text) + "'");
}

/// The discretized probability space: ordered cells with positive weights
/// summing to one. In splittable mode cell k is [anchor(k), anchor(k)+weight(k)).
template <class T>
class Grid {
 public:
  /// Normalizes `weights` to total mass one.
  static Grid build(std::span<const T> weights, SpaceMode mode) {
    if (weights.empty()) throw InvalidArgument("grid needs at least one cell");
    T total(0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (!is_finite(weights[k])) throw InvalidArgument("cell " + std::to_string(k) + " has a non-finite weight");
      if (!(weights[k] > T(0))) throw InvalidArgument("cell " + std::to_string(k) + " has a non-positive weight");
      total += weights[k];
    }
    std::vector<T> normalized(weights.begin(), weights.end());
    if (total != T(1))
      for (auto& w : normalized) w /= total;
    return Grid(std::move(normalized), mode);
  }

  static Grid build(const std::vector<T>& weights, SpaceMode mode) {
    return build(std::span<const T>(weights), mode);
  }

  /// For grids derived from an existing one (cell splits) whose weights
  /// already sum to one; skips renormalization so sub-cell geometry is kept.
  static Grid from_normalized(std::vector<T> weights, SpaceMode mode) {
    if (weights.empty()) throw InvalidArgument("grid needs at least one cell");
    for (const auto& w : weights)
      if (!(w > T(0)) || !is_finite(w)) throw InvalidArgument("derived grid has a non-positive cell");
    return Grid(std::move(weights), mode);
  }

  std::size_t size() const { return weights_.size(); }
  SpaceMode mode() const { return mode_; }
  const T& weight(std::size_t k) const { return weights_.at(k); }
  const T& anchor(std::size_t k) const { return anchors_.at(k); }
  std::span<const T> weights() const { return weights_; }
  std::span<const T> anchors() const { return anchors_; }

  T max_weight() const { return *std::max_element(weights_.begin(), weights_.end()); }

  Grid with_mode(SpaceMode mode) const { return Grid(weights_, mode); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.mode_ == b.mode_ && a.weights_ == b.weights_;
  }

 // An empty placeholder; only build() produces a usable grid.
  Grid() = default;

 private:
  Grid(std::vector<T> weights, SpaceMode mode) : weights_(std::move(weights)), mode_(mode) {
    anchors_.reserve(weights_.size());
    T running(0);
    for (const auto& w : weights_) {
      anchors_.push_back(running);
      running += w;
    }
  }

  std::vector<T> weights_;
  std::vector<T> anchors_;
  SpaceMode mode_ = SpaceMode::Splittable;
};

template <class T>
Grid<T> build_grid(std::span<const T> weights, SpaceMode mode) {
  return Grid<T>::build(weights, mode);
}

}  // namespace condbb
