#pragma once

// Purification of Young measures over a finite action set: replace the
// mixed strategy δ by a pure one f with f(ω) ∈ supp δ_ω and the same
// conditional payoffs E(δ.V|𝒞) = E(f.V|𝒞).

#include "condbb/bangbang.hpp"

#include <string>

namespace condbb {

/// Probabilities per cell over an ordered set of action labels.
template <class T>
class YoungMeasure {
 public:
  YoungMeasure(std::vector<std::string> actions, SimpleFunction<T> probabilities,
               const T& tol = NumTraits<T>::default_tolerance())
      : actions_(std::move(actions)), probabilities_(std::move(probabilities)) {
    if (actions_.empty()) throw InvalidArgument("action set is empty");
    for (std::size_t a = 0; a < actions_.size(); ++a)
      for (std::size_t b = 0; b < a; ++b)
        if (actions_[a] == actions_[b]) throw InvalidArgument("duplicate action '" + actions_[a] + "'");
    if (probabilities_.dim() != actions_.size())
      throw InvalidArgument("one probability per action expected in every cell");
    for (std::size_t k = 0; k < probabilities_.rows(); ++k) {
      T sum(0);
      for (std::size_t a = 0; a < actions_.size(); ++a) {
        if (probabilities_(k, a) < T(0))
          throw PreconditionError("negative probability in cell " + std::to_string(k), k);
        sum += probabilities_(k, a);
      }
      if (abs_value(sum - T(1)) > tol)
        throw PreconditionError("probabilities of cell " + std::to_string(k) + " do not sum to 1", k);
    }
  }

  /// The pure strategy choosing action index `choice[k]` in cell k.
  static YoungMeasure dirac(std::vector<std::string> actions, const std::vector<std::size_t>& choice) {
    auto p = SimpleFunction<T>::zeros(choice.size(), actions.size());
    for (std::size_t k = 0; k < choice.size(); ++k) p(k, choice.at(k)) = T(1);
    return YoungMeasure(std::move(actions), std::move(p));
  }

  std::size_t action_count() const { return actions_.size(); }
  std::size_t cell_count() const { return probabilities_.rows(); }
  const std::vector<std::string>& actions() const { return actions_; }
  const SimpleFunction<T>& probabilities() const { return probabilities_; }
  const T& operator()(std::size_t k, std::size_t a) const { return probabilities_(k, a); }
  bool supports(std::size_t k, std::size_t a) const { return probabilities_(k, a) > T(0); }

 private:
  std::vector<std::string> actions_;
  SimpleFunction<T> probabilities_;
};

/// V(k, a) ∈ R^n for every cell and action.
template <class T>
class IntegrandFamily {
 public:
  IntegrandFamily(std::size_t dim, std::vector<std::vector<Point<T>>> values) : dim_(dim), values_(std::move(values)) {
    if (dim_ == 0) throw InvalidArgument("integrand dimension must be positive");
    for (const auto& cell : values_) {
      if (cell.size() != values_.front().size()) throw InvalidArgument("every cell needs a value per action");
      for (const auto& v : cell) {
        if (v.size() != dim_) throw InvalidArgument("integrand value has the wrong dimension");
        for (const auto& x : v)
          if (!is_finite(x)) throw InvalidArgument("non-finite integrand value");
      }
    }
  }

  /// Scalar integrands φ_1..φ_n stacked into one R^n-valued family; each φ
  /// is given as cells × actions.
  static IntegrandFamily stack(const std::vector<SimpleFunction<T>>& phis) {
    if (phis.empty()) throw InvalidArgument("integrand family is empty");
    const std::size_t cells = phis.front().rows();
    const std::size_t actions = phis.front().dim();
    std::vector<std::vector<Point<T>>> values(cells, std::vector<Point<T>>(actions));
    for (const auto& phi : phis) {
      if (phi.rows() != cells || phi.dim() != actions) throw InvalidArgument("integrands disagree in shape");
      for (std::size_t k = 0; k < cells; ++k)
        for (std::size_t a = 0; a < actions; ++a) values[k][a].push_back(phi(k, a));
    }
    return IntegrandFamily(phis.size(), std::move(values));
  }

  std::size_t dim() const { return dim_; }
  std::size_t cell_count() const { return values_.size(); }
  std::size_t action_count() const { return values_.empty() ? 0 : values_.front().size(); }
  const Point<T>& operator()(std::size_t k, std::size_t a) const { return values_.at(k).at(a); }

  /// The cell function k ↦ V(k, choice[k]).
  SimpleFunction<T> along(const std::vector<std::size_t>& choice) const {
    auto out = SimpleFunction<T>::zeros(values_.size(), dim_);
    for (std::size_t k = 0; k < values_.size(); ++k)
      std::copy(values_[k].at(choice[k]).begin(), values_[k].at(choice[k]).end(), out.at(k).begin());
    return out;
  }

 private:
  std::size_t dim_;
  std::vector<std::vector<Point<T>>> values_;
};

namespace detail {

template <class T>
void require_shapes(const YoungMeasure<T>& delta, const IntegrandFamily<T>& V, const Grid<T>& grid) {
  if (delta.cell_count() != grid.size() || V.cell_count() != grid.size())
    throw InvalidArgument("Young measure, integrands and grid must have the same cells");
  if (V.action_count() != delta.action_count())
    throw InvalidArgument("integrands must give a value for every action");
}

}  // namespace detail

/// p̄(k) = Σ_a δ(k,a)·V(k,a).
template <class T>
SimpleFunction<T> barycenter(const YoungMeasure<T>& delta, const IntegrandFamily<T>& V, const Grid<T>& grid) {
  detail::require_shapes(delta, V, grid);
  auto out = SimpleFunction<T>::zeros(grid.size(), V.dim());
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (std::size_t a = 0; a < delta.action_count(); ++a) {
      if (!delta.supports(k, a)) continue;
      for (std::size_t j = 0; j < V.dim(); ++j) out(k, j) += delta(k, a) * V(k, a)[j];
    }
  return out;
}

/// Per cell the points {V(k,a) : δ(k,a) > 0}, in action order.
template <class T>
PolytopeMap<T> support_polytope(const YoungMeasure<T>& delta, const IntegrandFamily<T>& V, const Grid<T>& grid) {
  detail::require_shapes(delta, V, grid);
  std::vector<std::vector<Point<T>>> vertices(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t a = 0; a < delta.action_count(); ++a)
      if (delta.supports(k, a)) vertices[k].push_back(V(k, a));
    if (vertices[k].empty()) throw PreconditionError("cell " + std::to_string(k) + " has empty support", k);
  }
  return PolytopeMap<T>(V.dim(), std::move(vertices));
}

/// f = action[i][k] on pieces[i] ∩ cell k.
template <class T>
struct PureStrategy {
  std::vector<RefinedSet<T>> pieces;
  std::vector<std::vector<std::size_t>> action;  // [piece][cell] action index
};

template <class T>
struct PurifyResult {
  PureStrategy<T> strategy;
  BangBangResult<T> bang_bang;
  BlockFunction<T> mixed_side;  // E(δ.V|𝒞)
  BlockFunction<T> pure_side;   // E(f.V|𝒞)
  T max_deviation = T(0);
  T bound = T(0);
};

/// Pure strategy with the same conditional payoffs: bang-bang on the
/// barycenter inside the support polytope, then on each piece the supported
/// action whose value is the chosen vertex (smallest index among equals).
template <class T>
PurifyResult<T> purify(const YoungMeasure<T>& delta, const IntegrandFamily<T>& V, const BlockPartition& C,
                       const Grid<T>& grid, const T& tol = NumTraits<T>::default_tolerance(),
                       bool diagonal_only = false) {
  require_compatible(grid, C);
  const auto pbar = barycenter(delta, V, grid);
  const auto polytope = support_polytope(delta, V, grid);
  PurifyResult<T> out;
  out.bang_bang = bang_bang(polytope, pbar, C, grid, tol, diagonal_only);
  const auto& sel = out.bang_bang.selection;
  out.strategy.pieces = sel.pieces;
  out.strategy.action.assign(sel.pieces.size(), std::vector<std::size_t>(grid.size(), 0));
  for (std::size_t i = 0; i < sel.pieces.size(); ++i)
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto point = sel.values[i].at(k);
      std::size_t chosen = delta.action_count();
      for (std::size_t a = 0; a < delta.action_count() && chosen == delta.action_count(); ++a) {
        if (!delta.supports(k, a)) continue;
        T gap(0);
        for (std::size_t j = 0; j < V.dim(); ++j) gap = std::max(gap, abs_value(V(k, a)[j] - point[j]));
        if (!(gap > tol)) chosen = a;
      }
      if (chosen == delta.action_count())
        throw Error("cell " + std::to_string(k) + ": no supported action matches the selected vertex");
      out.strategy.action[i][k] = chosen;
    }
  out.mixed_side = cond_exp(pbar, C, grid);
  out.pure_side = BlockFunction<T>::zeros(C.block_count(), V.dim());
  for (std::size_t i = 0; i < sel.pieces.size(); ++i)
    out.pure_side += weighted_ce_measure(V.along(out.strategy.action[i]), out.strategy.pieces[i], C, grid);
  out.max_deviation = max_abs_difference(out.pure_side, out.mixed_side);
  out.bound = out.bang_bang.bound;
  return out;
}

/// One purification step for a finite family of scalar integrands φ_i
/// (each cells × actions): the pure strategy matches δ on every E(·.φ_i|𝒞).
template <class T>
PurifyResult<T> density_step(const YoungMeasure<T>& delta, const std::vector<SimpleFunction<T>>& phis,
                             const BlockPartition& C, const Grid<T>& grid,
                             const T& tol = NumTraits<T>::default_tolerance()) {
  return purify(delta, IntegrandFamily<T>::stack(phis), C, grid, tol);
}

}  // namespace condbb
