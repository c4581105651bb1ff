#pragma once

// Lyapunov partitions of conditional-expectation vector measures.
//
// Everything reduces to one finite system per block b: choose fractions
// x(k,i) ≥ 0 with Σ_i x(k,i) = 1 for every cell k ∈ b such that
//   Σ_k ω(k)·x(k,i)·c(k,i) = Σ_k ω(k)·α(k,i)·c(k,i)      (R equations)
// where ω is the moment weight of a cell and c(k,i) ∈ R^R its coefficient
// vector for piece i. x = α is always feasible. Splittable grids realize x
// directly as stacked sub-intervals. Atomic grids first pivot x to a basic
// solution along kernel directions (at most R cells stay fractional), then
// round every fractional cell to its largest piece.

#include "condbb/condexp.hpp"
#include "condbb/linalg.hpp"
#include "condbb/spaces.hpp"

#include <algorithm>
#include <vector>

namespace condbb {

template <class T>
struct PartitionResult {
  std::size_t piece_count = 0;
  std::size_t moment_dim = 0;
  std::vector<RefinedSet<T>> pieces;     // partition of the base set
  std::vector<BlockFunction<T>> achieved;  // per piece: E(h·χ_{B_i}|𝒞)
  std::vector<BlockFunction<T>> target;    // per piece: E(h·α_i·χ_base|𝒞)
  std::vector<BlockFunction<T>> residual;  // achieved − target
  T max_residual = T(0);
  T residual_bound = T(0);
  T seed_residual = T(0);   // moment error of x = α, checked before pivoting
  T pivot_residual = T(0);  // moment error after pivoting, before rounding
  std::vector<std::size_t> fractional_cells;  // per block, after pivoting
};

namespace detail {

template <class T>
struct MomentSystem {
  std::size_t pieces = 0;
  std::size_t rows = 0;
  std::vector<T> omega;  // per cell; cells with ω = 0 are left out
  SimpleFunction<T> alpha;
  std::vector<T> coef;  // cells × pieces × rows

  std::span<const T> c(std::size_t k, std::size_t i) const { return {coef.data() + (k * pieces + i) * rows, rows}; }
};

template <class T>
struct Fractions {
  std::vector<std::vector<T>> x;  // cells × pieces
  std::vector<std::size_t> fractional;
  T seed_residual = T(0);
  T pivot_residual = T(0);
};

// Σ_k ω(k)·x(k,i)·c(k,i) − Σ_k ω(k)·α(k,i)·c(k,i), max over (i, row), / μ(b).
template <class T>
T moment_error(const MomentSystem<T>& sys, std::span<const std::size_t> cells,
               const std::vector<std::vector<T>>& x, const T& block_mass) {
  T worst(0);
  for (std::size_t i = 0; i < sys.pieces; ++i)
    for (std::size_t r = 0; r < sys.rows; ++r) {
      T got(0), want(0);
      for (auto k : cells) {
        got += sys.omega[k] * x[k][i] * sys.c(k, i)[r];
        want += sys.omega[k] * sys.alpha(k, i) * sys.c(k, i)[r];
      }
      worst = std::max(worst, abs_value(got - want) / block_mass);
    }
  return worst;
}

// Moves x along kernel directions until the fractional variables of the
// block are linearly independent.
template <class T>
void pivot_block(const MomentSystem<T>& sys, std::span<const std::size_t> cells, std::vector<std::vector<T>>& x,
                 const T& pivot_tol) {
  const std::size_t p = sys.pieces;
  const std::size_t R = sys.rows;
  struct Var {
    std::size_t cell;
    std::size_t piece;
    std::size_t ref;
  };
  for (;;) {
    std::vector<Var> free;
    for (auto k : cells) {
      std::size_t ref = p;
      for (std::size_t i = 0; i < p; ++i) {
        if (!(x[k][i] > T(0))) continue;
        if (ref == p)
          ref = i;
        else
          free.push_back({k, i, ref});
      }
      if (free.size() > R) break;
    }
    if (free.empty()) return;
    const std::size_t cols = std::min(free.size(), R + 1);
    linalg::Matrix<T> a(R, cols);
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& v = free[c];
      auto own = sys.c(v.cell, v.piece);
      auto ref = sys.c(v.cell, v.ref);
      for (std::size_t r = 0; r < R; ++r) a(r, c) = sys.omega[v.cell] * (own[r] - ref[r]);
    }
    auto z = linalg::kernel_vector(a, pivot_tol);
    if (!z) return;

    // Ratio test over the moved variables; reference variables absorb the
    // negative sum of their cell's moves. Ties go to the smallest (cell, piece).
    std::vector<std::pair<std::size_t, std::size_t>> touched_refs;
    std::vector<T> ref_move;
    for (std::size_t c = 0; c < cols; ++c) {
      std::pair<std::size_t, std::size_t> key{free[c].cell, free[c].ref};
      auto it = std::find(touched_refs.begin(), touched_refs.end(), key);
      if (it == touched_refs.end()) {
        touched_refs.push_back(key);
        ref_move.push_back(T(0));
        it = touched_refs.end() - 1;
      }
      ref_move[static_cast<std::size_t>(it - touched_refs.begin())] -= (*z)[c];
    }
    bool found = false;
    T theta(0);
    std::pair<std::size_t, std::size_t> leave{0, 0};
    auto consider = [&](std::size_t cell, std::size_t piece, const T& value, const T& rate) {
      if (!(rate < T(0))) return;
      const T ratio = value / -rate;
      const std::pair<std::size_t, std::size_t> key{cell, piece};
      if (!found || ratio < theta || (ratio == theta && key < leave)) {
        found = true;
        theta = ratio;
        leave = key;
      }
    };
    for (std::size_t c = 0; c < cols; ++c) consider(free[c].cell, free[c].piece, x[free[c].cell][free[c].piece], (*z)[c]);
    for (std::size_t r = 0; r < touched_refs.size(); ++r)
      consider(touched_refs[r].first, touched_refs[r].second, x[touched_refs[r].first][touched_refs[r].second],
               ref_move[r]);
    if (!found) return;  // z = 0 cannot happen; kept as a guard

    for (std::size_t c = 0; c < cols; ++c) x[free[c].cell][free[c].piece] += theta * (*z)[c];
    for (std::size_t r = 0; r < touched_refs.size(); ++r)
      x[touched_refs[r].first][touched_refs[r].second] += theta * ref_move[r];
    x[leave.first][leave.second] = T(0);
    for (std::size_t c = 0; c < cols; ++c)
      for (auto& v : x[free[c].cell])
        if (v < T(0) || (!NumTraits<T>::exact && v < pivot_tol)) v = T(0);
  }
}

template <class T>
Fractions<T> solve(const MomentSystem<T>& sys, const BlockPartition& C, const Grid<T>& grid, const T& pivot_tol) {
  Fractions<T> out;
  out.x.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out.x[k].assign(sys.alpha.at(k).begin(), sys.alpha.at(k).end());
  out.fractional.assign(C.block_count(), 0);
  const auto mu = block_masses(grid, C);
  for (std::size_t b = 0; b < C.block_count(); ++b) {
    std::vector<std::size_t> cells;
    for (auto k : C.cells_in(b))
      if (sys.omega[k] > T(0)) cells.push_back(k);
    out.seed_residual = std::max(out.seed_residual, moment_error(sys, cells, out.x, mu[b]));
    if (grid.mode() == SpaceMode::Splittable) continue;
    pivot_block(sys, cells, out.x, pivot_tol);
    out.pivot_residual = std::max(out.pivot_residual, moment_error(sys, cells, out.x, mu[b]));
    for (auto k : cells) {
      const auto positive = std::count_if(out.x[k].begin(), out.x[k].end(), [](const T& v) { return v > T(0); });
      if (positive > 1) ++out.fractional[b];
    }
  }
  if (grid.mode() == SpaceMode::Atomic)
    for (auto& row : out.x) {
      const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
      for (std::size_t i = 0; i < row.size(); ++i) row[i] = T(i == best ? 1 : 0);
    }
  return out;
}

// Piece i takes the share x(k,i) of base's mass in cell k, pieces stacked
// left to right in piece order; the last nonempty piece takes the rest so
// the pieces cover base exactly.
template <class T>
std::vector<RefinedSet<T>> realize(const RefinedSet<T>& base, const std::vector<std::vector<T>>& x,
                                   std::size_t pieces, const Grid<T>& grid) {
  std::vector<std::vector<Interval<T>>> parts(pieces);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const T mass = base.mass_in(k);
    if (!(mass > T(0))) continue;
    std::size_t last = 0;
    for (std::size_t i = 0; i < pieces; ++i)
      if (x[k][i] > T(0)) last = i;
    T cursor(0);
    for (std::size_t i = 0; i <= last; ++i) {
      if (!(x[k][i] > T(0))) continue;
      T length = i == last ? mass - cursor : x[k][i] * mass;
      if (cursor + length > mass) length = mass - cursor;
      const auto piece = base.carve(k, cursor, length);
      parts[i].insert(parts[i].end(), piece.intervals().begin(), piece.intervals().end());
      cursor += length;
    }
  }
  std::vector<RefinedSet<T>> out;
  for (auto& p : parts) out.push_back(RefinedSet<T>::from_intervals(grid, std::move(p)));
  return out;
}

template <class T>
void require_weights(const SimpleFunction<T>& alpha, const Grid<T>& grid, const T& tol) {
  require_on_grid(alpha, grid);
  for (std::size_t k = 0; k < alpha.rows(); ++k) {
    T sum(0);
    for (std::size_t i = 0; i < alpha.dim(); ++i) {
      if (alpha(k, i) < -tol) throw PreconditionError("negative piece weight in cell " + std::to_string(k), k);
      sum += alpha(k, i);
    }
    if (abs_value(sum - T(1)) > tol)
      throw PreconditionError("piece weights of cell " + std::to_string(k) + " do not sum to 1", k);
  }
}

template <class T>
T min_block_mass(const Grid<T>& grid, const BlockPartition& C) {
  const auto mu = block_masses(grid, C);
  return *std::min_element(mu.begin(), mu.end());
}

// One moment row set per piece: c(k,i) = e_i ⊗ h(k).
template <class T>
MomentSystem<T> separate_moments(const SimpleFunction<T>& h, const SimpleFunction<T>& alpha, std::vector<T> omega) {
  MomentSystem<T> sys;
  sys.pieces = alpha.dim();
  sys.rows = sys.pieces * h.dim();
  sys.omega = std::move(omega);
  sys.alpha = alpha;
  sys.coef.assign(h.rows() * sys.pieces * sys.rows, T(0));
  for (std::size_t k = 0; k < h.rows(); ++k)
    for (std::size_t i = 0; i < sys.pieces; ++i)
      for (std::size_t j = 0; j < h.dim(); ++j) sys.coef[(k * sys.pieces + i) * sys.rows + i * h.dim() + j] = h(k, j);
  return sys;
}

// Realizes fractions on `base` and measures both sides of every piece's
// moment equation for the moments h. The bound is left to the caller.
template <class T>
PartitionResult<T> assemble(const RefinedSet<T>& base, const SimpleFunction<T>& h, const SimpleFunction<T>& alpha,
                            const BlockPartition& C, const Grid<T>& grid, const Fractions<T>& fr) {
  PartitionResult<T> out;
  out.piece_count = alpha.dim();
  out.moment_dim = h.dim();
  out.pieces = realize(base, fr.x, out.piece_count, grid);
  out.seed_residual = fr.seed_residual;
  out.pivot_residual = fr.pivot_residual;
  out.fractional_cells = fr.fractional;
  for (std::size_t i = 0; i < out.piece_count; ++i) {
    out.achieved.push_back(weighted_ce_measure(h, out.pieces[i], C, grid));
    out.target.push_back(weighted_ce_measure(scale_by(alpha.component(i), h), base, C, grid));
    out.residual.push_back(out.achieved.back() - out.target.back());
    out.max_residual = std::max(out.max_residual, max_abs(out.residual.back()));
  }
  return out;
}

template <class T>
PartitionResult<T> partition_of(const RefinedSet<T>& base, const SimpleFunction<T>& h, const SimpleFunction<T>& alpha,
                                const BlockPartition& C, const Grid<T>& grid, const T& tol, const T& pivot_tol) {
  require_on_grid(h, grid);
  require_compatible(grid, C);
  require_weights(alpha, grid, tol);
  const auto sys = separate_moments(h, alpha, base.cell_masses(grid.size()));
  auto out = assemble(base, h, alpha, C, grid, solve(sys, C, grid, pivot_tol));
  if (grid.mode() == SpaceMode::Splittable)
    out.residual_bound = tol;
  else
    out.residual_bound = T(out.piece_count) * T(out.moment_dim) * grid.max_weight() * max_abs(h) /
                         min_block_mass(grid, C);
  return out;
}

}  // namespace detail

/// Pieces B_1..B_p of Ω with E(χ_{B_i} h|𝒞) = E(α_i h|𝒞) for every piece,
/// exactly on splittable grids and within `residual_bound` on atomic ones.
/// The atomic bound is p·D·w_max·H_max / min_b μ(b).
template <class T>
PartitionResult<T> lyapunov_partition(const SimpleFunction<T>& h, const SimpleFunction<T>& alpha,
                                      const BlockPartition& C, const Grid<T>& grid,
                                      const T& tol = NumTraits<T>::default_tolerance(),
                                      const T& pivot_tol = NumTraits<T>::pivot_tolerance()) {
  return detail::partition_of(RefinedSet<T>::whole(grid), h, alpha, C, grid, tol, pivot_tol);
}

template <class T>
struct HalfSetResult {
  RefinedSet<T> half;                // F ⊂ E
  RefinedSet<T> rest;                // E \ F
  BlockFunction<T> achieved;         // E(h·χ_F|𝒞)
  BlockFunction<T> target;           // E(h·χ_E|𝒞)/2
  T max_residual = T(0);
  T residual_bound = T(0);
  std::vector<std::size_t> fractional_cells;
};

/// F ⊂ E with E(h·χ_F|𝒞) = E(h·χ_E|𝒞)/2: the two-piece partition of E with
/// equal weights.
template <class T>
HalfSetResult<T> half_set(const SimpleFunction<T>& h, const RefinedSet<T>& E, const BlockPartition& C,
                          const Grid<T>& grid, const T& tol = NumTraits<T>::default_tolerance(),
                          const T& pivot_tol = NumTraits<T>::pivot_tolerance()) {
  for (const auto& iv : E.intervals())
    if (iv.cell >= grid.size()) throw InvalidArgument("set references unknown cell " + std::to_string(iv.cell));
  if (grid.mode() == SpaceMode::Atomic && !E.is_cell_aligned(grid))
    throw InvalidArgument("sets on an atomic grid must take whole cells");
  const auto alpha = SimpleFunction<T>::constant(grid.size(), {T(1) / T(2), T(1) / T(2)});
  auto part = detail::partition_of(E, h, alpha, C, grid, tol, pivot_tol);
  HalfSetResult<T> out;
  out.half = part.pieces[0];
  out.rest = part.pieces[1];
  out.achieved = part.achieved[0];
  out.target = part.target[0];
  out.max_residual = max_abs(part.residual[0]);
  out.residual_bound = part.residual_bound;
  out.fractional_cells = part.fractional_cells;
  return out;
}

template <class T>
struct AnnihilatorWitness {
  CellSplit<T> split;             // the refined grid g lives on
  SimpleFunction<T> g;            // scalar, on split.grid
  RefinedSet<T> support;          // E′ on split.grid
  RefinedSet<T> set;              // E on split.grid
  BlockPartition partition;       // 𝒞 on split.grid
  BlockFunction<T> duality;       // E(f·g·χ_E|𝒞), zero
  T norm_inf = T(0);
  bool zero_integrand = false;    // f vanished on part of E and g = χ_{E′}
};

/// A bounded g ≠ 0 supported in E with E(f·g·χ_E|𝒞) = 0, showing that
/// g ↦ ∫_E g d(fG_𝒞) is not injective. Only splittable grids admit one.
template <class T>
AnnihilatorWitness<T> annihilator_witness(const SimpleFunction<T>& f, const RefinedSet<T>& E, const BlockPartition& C,
                                          const Grid<T>& grid, const T& tol = NumTraits<T>::default_tolerance()) {
  detail::require_on_grid(f, grid);
  require_compatible(grid, C);
  if (f.dim() != 1) throw InvalidArgument("annihilator needs a scalar function");
  if (grid.mode() == SpaceMode::Atomic)
    throw PreconditionError("atomic grid: cells cannot be split, so no annihilating witness exists in general");
  const auto masses = E.cell_masses(grid.size());
  const T total = E.total_mass();
  if (!(total > T(0))) throw PreconditionError("set has zero mass");

  AnnihilatorWitness<T> out;
  std::vector<Interval<T>> zero_parts;
  for (const auto& iv : E.intervals())
    if (f(iv.cell, 0) == T(0)) zero_parts.push_back(iv);
  if (!zero_parts.empty()) {
    const auto support = RefinedSet<T>::from_intervals(grid, std::move(zero_parts));
    out.split = split_cells(grid, {E, support});
    out.support = out.split.lift(support);
    out.zero_integrand = true;
    out.g = SimpleFunction<T>::zeros(out.split.grid.size(), 1);
    for (std::size_t c = 0; c < out.split.grid.size(); ++c)
      if (out.support.mass_in(c) > T(0)) out.g(c, 0) = T(1);
  } else {
    // ε = weighted upper median of |f| over E, so E′ = E ∩ {|f| ≥ ε} keeps
    // at least half of E's mass.
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (masses[k] > T(0)) order.push_back(k);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return abs_value(f(a, 0)) > abs_value(f(b, 0)); });
    T covered(0);
    T eps(0);
    for (auto k : order) {
      covered += masses[k];
      eps = abs_value(f(k, 0));
      if (!(covered < total / T(2))) break;
    }
    std::vector<Interval<T>> strong, left;
    for (const auto& iv : E.intervals())
      if (!(abs_value(f(iv.cell, 0)) < eps)) strong.push_back(iv);
    const auto e_prime = RefinedSet<T>::from_intervals(grid, std::move(strong));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const T m = e_prime.mass_in(k);
      if (m > T(0)) {
        auto piece = e_prime.carve(k, T(0), m / T(2));
        left.insert(left.end(), piece.intervals().begin(), piece.intervals().end());
      }
    }
    const auto e0 = RefinedSet<T>::from_intervals(grid, std::move(left));
    out.split = split_cells(grid, {E, e_prime, e0});
    out.support = out.split.lift(e_prime);
    const auto e0_fine = out.split.lift(e0);
    const auto C_fine = out.split.lift(C);
    const auto D = refine_partition(C_fine, out.support, out.split.grid);
    const auto cond = ce_measure(e0_fine, D, out.split.grid);
    out.g = SimpleFunction<T>::zeros(out.split.grid.size(), 1);
    for (std::size_t c = 0; c < out.split.grid.size(); ++c) {
      if (!(out.support.mass_in(c) > T(0))) continue;
      const T indicator = e0_fine.mass_in(c) > T(0) ? T(1) : T(0);
      out.g(c, 0) = (indicator - cond(D.block_of(c), 0)) / f(out.split.parent[c], 0);
    }
  }
  out.set = out.split.lift(E);
  out.partition = out.split.lift(C);
  out.norm_inf = max_abs(out.g);
  out.duality = weighted_ce_measure(scale_by(out.g, out.split.lift(f)), out.set, out.partition, out.split.grid);
  if (!(out.norm_inf > T(0)) || max_abs(out.duality) > tol || !out.set.contains(out.support))
    throw Error("annihilator witness failed its own certification");
  return out;
}

template <class T>
struct MultiPartitionResult {
  std::size_t piece_count = 0;
  std::size_t measure_count = 0;
  std::vector<RefinedSet<T>> pieces;
  std::vector<std::vector<T>> measures;  // normalized μ_i per cell
  std::vector<BlockFunction<T>> achieved;  // per measure: blocks × pieces, E^{μ_i}(f_i·χ_{B_j}|𝒞)
  std::vector<BlockFunction<T>> target;    // per measure: blocks × pieces, E^{μ_i}(f_i·α_j|𝒞)
  std::vector<BlockFunction<T>> residual;
  T max_residual = T(0);
  T residual_bound = T(0);
  T seed_residual = T(0);
  std::vector<std::size_t> fractional_cells;
};

namespace detail {

// E^{ν}(f·x_j|𝒞) per block and piece, with x(k,j) the fraction of cell k in
// piece j. Blocks null under ν get 0.
template <class T>
BlockFunction<T> measure_moments(const std::vector<T>& nu, const SimpleFunction<T>& f, std::size_t component,
                                 const std::vector<std::vector<T>>& x, std::size_t pieces, const BlockPartition& C) {
  auto out = BlockFunction<T>::zeros(C.block_count(), pieces);
  for (std::size_t b = 0; b < C.block_count(); ++b) {
    T mass(0);
    for (auto k : C.cells_in(b)) mass += nu[k];
    if (!(mass > T(0))) continue;
    for (std::size_t j = 0; j < pieces; ++j) {
      T sum(0);
      for (auto k : C.cells_in(b)) sum += f(k, component) * nu[k] * x[k][j];
      out(b, j) = sum / mass;
    }
  }
  return out;
}

}  // namespace detail

/// Pieces that split every f_i in the right proportions under every μ_i at
/// once: E^{μ_i}(f_i χ_{B_j}|𝒞) = E^{μ_i}(f_i α_j|𝒞). Solved as one
/// partition under μ = mean of the μ_i with moments f_i·dμ_i/dμ. The grid
/// supplies the cell geometry the pieces are cut from.
template <class T>
MultiPartitionResult<T> lyapunov_partition_multi(const std::vector<std::vector<T>>& measures,
                                                 const SimpleFunction<T>& f, const SimpleFunction<T>& alpha,
                                                 const BlockPartition& C, const Grid<T>& grid,
                                                 const T& tol = NumTraits<T>::default_tolerance(),
                                                 const T& pivot_tol = NumTraits<T>::pivot_tolerance()) {
  require_compatible(grid, C);
  detail::require_on_grid(f, grid);
  detail::require_weights(alpha, grid, tol);
  const std::size_t d = measures.size();
  if (d == 0) throw InvalidArgument("at least one measure expected");
  if (f.dim() != d) throw InvalidArgument("one function component per measure expected");
  MultiPartitionResult<T> out;
  out.piece_count = alpha.dim();
  out.measure_count = d;
  for (std::size_t i = 0; i < d; ++i) {
    if (measures[i].size() != grid.size()) throw InvalidArgument("measure " + std::to_string(i) + " has wrong length");
    T total(0);
    for (const auto& v : measures[i]) {
      if (!is_finite(v) || v < T(0)) throw InvalidArgument("measure " + std::to_string(i) + " has a negative mass");
      total += v;
    }
    if (!(total > T(0))) throw PreconditionError("measure " + std::to_string(i) + " is zero");
    std::vector<T> normalized(measures[i]);
    if (total != T(1))
      for (auto& v : normalized) v /= total;
    out.measures.push_back(std::move(normalized));
  }
  std::vector<T> mu(grid.size(), T(0));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t i = 0; i < d; ++i) mu[k] += out.measures[i][k];
    mu[k] /= T(d);
  }
  for (std::size_t b = 0; b < C.block_count(); ++b) {
    T mass(0);
    for (auto k : C.cells_in(b)) mass += mu[k];
    if (!(mass > T(0))) throw PreconditionError("block " + std::to_string(b) + " is null under every measure");
  }
  auto H = SimpleFunction<T>::zeros(grid.size(), d);
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (mu[k] > T(0))
      for (std::size_t i = 0; i < d; ++i) H(k, i) = f(k, i) * (out.measures[i][k] / mu[k]);

  const auto sys = detail::separate_moments(H, alpha, mu);
  auto fr = detail::solve(sys, C, grid, pivot_tol);
  out.seed_residual = fr.seed_residual;
  out.fractional_cells = fr.fractional;
  out.pieces = detail::realize(RefinedSet<T>::whole(grid), fr.x, out.piece_count, grid);

  // Fractions actually realized by the pieces, then both sides per measure.
  std::vector<std::vector<T>> realized(grid.size(), std::vector<T>(out.piece_count, T(0)));
  std::vector<std::vector<T>> weights(grid.size());
  for (std::size_t j = 0; j < out.piece_count; ++j) {
    const auto m = out.pieces[j].cell_masses(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) realized[k][j] = m[k] / grid.weight(k);
  }
  for (std::size_t k = 0; k < grid.size(); ++k) weights[k].assign(alpha.at(k).begin(), alpha.at(k).end());
  T min_mass(0);
  bool have_min = false;
  for (std::size_t i = 0; i < d; ++i) {
    out.achieved.push_back(detail::measure_moments(out.measures[i], f, i, realized, out.piece_count, C));
    out.target.push_back(detail::measure_moments(out.measures[i], f, i, weights, out.piece_count, C));
    out.residual.push_back(out.achieved.back() - out.target.back());
    out.max_residual = std::max(out.max_residual, max_abs(out.residual.back()));
    for (std::size_t b = 0; b < C.block_count(); ++b) {
      T mass(0);
      for (auto k : C.cells_in(b)) mass += out.measures[i][k];
      if (mass > T(0) && (!have_min || mass < min_mass)) {
        min_mass = mass;
        have_min = true;
      }
    }
  }
  if (grid.mode() == SpaceMode::Splittable) {
    out.residual_bound = tol;
  } else {
    const T omega_max = *std::max_element(mu.begin(), mu.end());
    out.residual_bound = T(out.piece_count) * T(d) * omega_max * max_abs(H) / min_mass;
  }
  return out;
}

}  // namespace condbb
