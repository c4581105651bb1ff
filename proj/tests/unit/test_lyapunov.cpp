#include <doctest.h>

#include "condbb/lyapunov.hpp"
#include "condbb/oracle.hpp"
#include "support/checks.hpp"
#include "support/random_instances.hpp"

using namespace condbb;
using condbb::testing::near;

namespace {

template <class T>
Grid<T> uniform4(SpaceMode mode = SpaceMode::Splittable) {
  return Grid<T>::build(std::vector<T>(4, T(1)), mode);
}

template <class T>
Grid<T> atoms(std::initializer_list<int> tenths) {
  std::vector<T> w;
  for (int t : tenths) w.push_back(T(t) / T(10));
  return Grid<T>::build(w, SpaceMode::Atomic);
}

// Pieces cover every cell exactly once.
template <class T>
bool partitions_grid(const std::vector<RefinedSet<T>>& pieces, const Grid<T>& grid, double tol) {
  for (std::size_t a = 0; a < pieces.size(); ++a)
    for (std::size_t b = a + 1; b < pieces.size(); ++b)
      if (pieces[a].intersect(pieces[b]).total_mass() > T(0)) return false;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    T mass(0);
    for (const auto& p : pieces) mass += p.mass_in(k);
    if (!near(mass, grid.weight(k), tol)) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("lyapunov") {
  TEST_CASE_TEMPLATE("symmetric split of a splittable grid", T, double, Rational) {
    auto g = uniform4<T>();
    BlockPartition C({0, 0, 1, 1});
    auto h = SimpleFunction<T>::scalar({T(1), T(2), T(3), T(4)});
    auto alpha = SimpleFunction<T>::constant(4, {T(1) / T(2), T(1) / T(2)});
    auto r = lyapunov_partition(h, alpha, C, g);
    for (std::size_t k = 0; k < 4; ++k) {
      REQUIRE(r.pieces[0].in_cell(k).size() == 1);
      CHECK(r.pieces[0].in_cell(k)[0].offset == T(0));
      CHECK(r.pieces[0].in_cell(k)[0].length() == T(1) / T(8));
      CHECK(r.pieces[1].in_cell(k)[0].offset == T(1) / T(8));
    }
    CHECK(r.max_residual == T(0));
    CHECK(r.seed_residual == T(0));
    CHECK(partitions_grid(r.pieces, g, 0));
  }

  TEST_CASE_TEMPLATE("degenerate weights give whole and empty pieces", T, double, Rational) {
    auto g = uniform4<T>();
    auto r = lyapunov_partition(SimpleFunction<T>::scalar({T(1), T(2), T(3), T(4)}),
                                SimpleFunction<T>::constant(4, {T(1), T(0)}), BlockPartition({0, 0, 1, 1}), g);
    CHECK(r.pieces[0] == RefinedSet<T>::whole(g));
    CHECK(r.pieces[1].empty());
  }

  TEST_CASE_TEMPLATE("two unequal atoms cannot be halved", T, double, Rational) {
    auto g = atoms<T>({6, 4});
    auto trivial = BlockPartition::trivial(2);
    auto one = SimpleFunction<T>::constant(2, {T(1)});
    auto alpha = SimpleFunction<T>::constant(2, {T(1) / T(2), T(1) / T(2)});
    auto r = lyapunov_partition(one, alpha, trivial, g);
    CHECK(near(r.max_residual, T(1) / T(10)));
    CHECK(r.max_residual <= r.residual_bound);
    auto best = oracle::enumerate_atomic_partitions(g, 2, one, alpha, trivial);
    CHECK(near(best.residual, T(1) / T(10)));
    CHECK(near(r.max_residual, best.residual));
    CHECK(partitions_grid(r.pieces, g, 0));
  }

  TEST_CASE("splittable partitions are exact on random instances") {
    testing::Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
      const auto m = testing::uniform_index(rng, 1, 64);
      const auto D = testing::uniform_index(rng, 1, 12);
      const auto p = testing::uniform_index(rng, 1, 5);
      auto g = testing::random_grid<double>(rng, m, SpaceMode::Splittable);
      auto C = testing::random_partition(rng, m, 8);
      auto h = testing::random_function<double>(rng, m, D);
      auto alpha = testing::random_alpha<double>(rng, m, p);
      auto r = lyapunov_partition(h, alpha, C, g);
      CHECK(r.max_residual <= 1e-9);
      CHECK(r.seed_residual == 0.0);
      CHECK(partitions_grid(r.pieces, g, 1e-12));
    }
  }

  TEST_CASE_TEMPLATE("atomic partitions stay within the certified bound", T, double, Rational) {
    testing::Rng rng(2);
    for (int trial = 0; trial < 150; ++trial) {
      const auto m = testing::uniform_index(rng, 1, 16);
      const auto D = testing::uniform_index(rng, 1, 3);
      const auto p = testing::uniform_index(rng, 1, 3);
      auto g = testing::random_grid<T>(rng, m, SpaceMode::Atomic);
      auto C = testing::random_partition(rng, m, 4);
      auto h = testing::random_function<T>(rng, m, D);
      auto alpha = testing::random_alpha<T>(rng, m, p);
      auto r = lyapunov_partition(h, alpha, C, g);
      CHECK(r.max_residual <= r.residual_bound);
      CHECK(near(r.pivot_residual, T(0), 1e-9));
      for (auto f : r.fractional_cells) CHECK(f <= p * D);
      CHECK(partitions_grid(r.pieces, g, 0));
      for (const auto& piece : r.pieces) CHECK(piece.is_cell_aligned(g));
      // never better than the exhaustive optimum
      std::uint64_t size = 1;
      for (std::size_t k = 0; k < m; ++k) size *= p;
      if (size <= (1u << 14)) {
        auto best = oracle::enumerate_atomic_partitions(g, p, h, alpha, C);
        CHECK(to_double(r.max_residual) >= to_double(best.residual) - 1e-12);
      }
    }
  }

  TEST_CASE("partition input errors") {
    auto g = uniform4<double>();
    auto C = BlockPartition::trivial(4);
    auto h = SimpleFunction<double>::constant(4, {1.0});
    CHECK_THROWS_AS(lyapunov_partition(h, SimpleFunction<double>::constant(4, {0.5, 0.4}), C, g), PreconditionError);
    CHECK_THROWS_AS(lyapunov_partition(h, SimpleFunction<double>::constant(4, {1.5, -0.5}), C, g), PreconditionError);
    CHECK_THROWS_AS(lyapunov_partition(SimpleFunction<double>::constant(3, {1.0}),
                                       SimpleFunction<double>::constant(4, {1.0}), C, g),
                    InvalidArgument);
  }

  TEST_CASE_TEMPLATE("half sets", T, double, Rational) {
    auto g = uniform4<T>();
    auto trivial = BlockPartition::trivial(4);
    auto one = SimpleFunction<T>::constant(4, {T(1)});
    auto r = half_set(one, RefinedSet<T>::whole(g), trivial, g);
    CHECK(r.achieved(0, 0) == T(1) / T(2));
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(r.half.in_cell(k)[0].offset == T(0));
      CHECK(r.half.in_cell(k)[0].length() == T(1) / T(8));
    }

    auto even = Grid<T>::build(std::vector<T>{T(1), T(1)}, SpaceMode::Atomic);
    auto r2 = half_set(SimpleFunction<T>::constant(2, {T(1)}), RefinedSet<T>::whole(even), BlockPartition::trivial(2),
                       even);
    CHECK(r2.max_residual == T(0));
    CHECK(r2.half.intervals().size() == 1);

    auto uneven = atoms<T>({6, 4});
    auto r3 = half_set(SimpleFunction<T>::constant(2, {T(1)}), RefinedSet<T>::whole(uneven),
                       BlockPartition::trivial(2), uneven);
    CHECK(near(r3.max_residual, T(1) / T(10)));
    CHECK(r3.max_residual <= r3.residual_bound);

    auto sub = RefinedSet<T>::from_intervals(uneven, {{0, T(0), T(1) / T(10)}});
    CHECK_THROWS_AS(half_set(SimpleFunction<T>::constant(2, {T(1)}), sub, BlockPartition::trivial(2), uneven),
                    InvalidArgument);
  }

  TEST_CASE_TEMPLATE("repeated halving gives a quarter", T, double, Rational) {
    testing::Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      const auto m = testing::uniform_index(rng, 1, 20);
      auto g = testing::random_grid<T>(rng, m, SpaceMode::Splittable);
      auto C = testing::random_partition(rng, m, 4);
      auto h = testing::random_function<T>(rng, m, testing::uniform_index(rng, 1, 3));
      auto E = testing::random_set(rng, g);
      auto first = half_set(h, E, C, g);
      CHECK(E.contains(first.half));
      CHECK(near(max_abs_difference(first.achieved, first.target), T(0), 1e-9));
      auto second = half_set(h, first.half, C, g);
      CHECK(first.half.contains(second.half));
      auto quarter = weighted_ce_measure(h, E, C, g);
      quarter *= T(1) / T(4);
      CHECK(near(max_abs_difference(weighted_ce_measure(h, second.half, C, g), quarter), T(0), 2e-9));
    }
  }

  TEST_CASE_TEMPLATE("annihilator examples", T, double, Rational) {
    auto g = uniform4<T>();
    BlockPartition C({0, 0, 1, 1});
    auto E = RefinedSet<T>::of_cells(g, {0, 1});
    auto w = annihilator_witness(SimpleFunction<T>::constant(4, {T(1)}), E, C, g);
    CHECK(w.split.grid.size() == 6);
    for (std::size_t c = 0; c < w.split.grid.size(); ++c) {
      const auto parent = w.split.parent[c];
      const bool left = w.split.start[c] == T(0);
      const T expected = parent < 2 ? (left ? T(1) / T(2) : T(-1) / T(2)) : T(0);
      CHECK(w.g(c, 0) == expected);
    }
    CHECK(w.norm_inf == T(1) / T(2));
    CHECK(max_abs(w.duality) == T(0));

    auto w2 = annihilator_witness(SimpleFunction<T>::constant(4, {T(2)}), E, C, g);
    CHECK(w2.support == w.support);
    for (std::size_t c = 0; c < w2.split.grid.size(); ++c) CHECK(w2.g(c, 0) == w.g(c, 0) / T(2));

    auto zero = annihilator_witness(SimpleFunction<T>::scalar({T(0), T(0), T(5), T(1)}), E, C, g);
    CHECK(zero.zero_integrand);
    CHECK(zero.support == zero.set);
    CHECK(zero.norm_inf == T(1));

    CHECK_THROWS_AS(annihilator_witness(SimpleFunction<T>::constant(4, {T(1)}), E, C, g.with_mode(SpaceMode::Atomic)),
                    PreconditionError);
    CHECK_THROWS_AS(annihilator_witness(SimpleFunction<T>::constant(4, {T(1)}), RefinedSet<T>(), C, g),
                    PreconditionError);
  }

  TEST_CASE_TEMPLATE("annihilator witnesses on random instances", T, double, Rational) {
    testing::Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
      const auto m = testing::uniform_index(rng, 1, 16);
      auto g = testing::random_grid<T>(rng, m, SpaceMode::Splittable);
      auto C = testing::random_partition(rng, m, 4);
      auto E = testing::random_set(rng, g);
      if (E.empty()) continue;
      auto f = testing::random_function<T>(rng, m, 1);
      auto w = annihilator_witness(f, E, C, g);
      CHECK(w.norm_inf > T(0));
      CHECK(w.set.contains(w.support));
      for (std::size_t c = 0; c < w.split.grid.size(); ++c)
        if (!(w.support.mass_in(c) > T(0))) CHECK(w.g(c, 0) == T(0));
      auto dual = oracle::direct_integrate(scale_by(w.g, w.split.lift(f)), w.set, w.partition, w.split.grid);
      CHECK(near(max_abs(dual), T(0), 1e-9));
    }
  }

  TEST_CASE_TEMPLATE("multi-measure partitions", T, double, Rational) {
    auto g = uniform4<T>();
    BlockPartition C({0, 0, 1, 1});
    auto f = SimpleFunction<T>::from_rows({{T(1), T(2)}, {T(3), T(-1)}, {T(0), T(4)}, {T(2), T(2)}});
    auto alpha = SimpleFunction<T>::constant(4, {T(1) / T(3), T(2) / T(3)});
    std::vector<T> mu1{T(1), T(2), T(3), T(4)};
    std::vector<T> mu2{T(4), T(0), T(1), T(1)};
    auto r = lyapunov_partition_multi({mu1, mu2}, f, alpha, C, g);
    CHECK(near(r.max_residual, T(0), 1e-9));
    // both sides recomputed from raw masses
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t j = 0; j < 2; ++j) {
          T lhs(0), rhs(0), mass(0);
          for (auto k : C.cells_in(b)) {
            const T mk = (i == 0 ? mu1 : mu2)[k];
            mass += mk;
            lhs += f(k, i) * mk * r.pieces[j].mass_in(k) / g.weight(k);
            rhs += f(k, i) * mk * alpha(k, j);
          }
          CHECK(near(lhs / mass, rhs / mass, 1e-9));
        }

    // proportional measures reduce to the single-measure path
    std::vector<T> twice;
    for (const auto& v : mu1) twice.push_back(T(2) * v);
    auto same = lyapunov_partition_multi({mu1, twice}, f, alpha, C, g);
    auto single = lyapunov_partition(f, alpha, C, Grid<T>::build(mu1, SpaceMode::Splittable));
    CHECK(same.max_residual <= T(1e-9));
    CHECK(single.max_residual <= T(1e-9));

    CHECK_THROWS_AS(lyapunov_partition_multi({std::vector<T>{T(1), T(1), T(0), T(0)}}, f.component(0), alpha, C, g),
                    PreconditionError);
    CHECK_THROWS_AS(lyapunov_partition_multi({mu1}, f, alpha, C, g), InvalidArgument);
  }

  TEST_CASE("equal measures bit-match the single-measure path in exact arithmetic") {
    testing::Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const auto m = testing::uniform_index(rng, 2, 12);
      for (auto mode : {SpaceMode::Splittable, SpaceMode::Atomic}) {
        auto g = testing::random_grid<Rational>(rng, m, mode);
        auto C = testing::random_partition(rng, m, 3);
        auto f = testing::random_function<Rational>(rng, m, 2);
        auto alpha = testing::random_alpha<Rational>(rng, m, 2);
        std::vector<Rational> mu(g.weights().begin(), g.weights().end());
        auto multi = lyapunov_partition_multi({mu, mu}, f, alpha, C, g);
        auto single = lyapunov_partition(f, alpha, C, g);
        CHECK(multi.pieces == single.pieces);
      }
    }
  }
}
