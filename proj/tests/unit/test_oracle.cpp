#include <doctest.h>

#include "condbb/condexp.hpp"
#include "condbb/oracle.hpp"
#include "support/checks.hpp"
#include "support/random_instances.hpp"

using namespace condbb;
using condbb::testing::near;

TEST_SUITE("oracle") {
  TEST_CASE_TEMPLATE("enumeration examples", T, double, Rational) {
    auto g = Grid<T>::build(std::vector<T>{T(6), T(4)}, SpaceMode::Atomic);
    auto one = SimpleFunction<T>::constant(2, {T(1)});
    auto halves = SimpleFunction<T>::constant(2, {T(1) / T(2), T(1) / T(2)});
    auto r = oracle::enumerate_atomic_partitions(g, 2, one, halves, BlockPartition::trivial(2));
    CHECK(near(r.residual, T(1) / T(10)));
    CHECK(r.visited == 4);

    auto u3 = Grid<T>::build(std::vector<T>(3, T(1)), SpaceMode::Atomic);
    auto thirds = SimpleFunction<T>::constant(3, {T(1) / T(3), T(1) / T(3), T(1) / T(3)});
    auto r3 = oracle::enumerate_atomic_partitions(u3, 3, SimpleFunction<T>::constant(3, {T(1)}), thirds,
                                                  BlockPartition::trivial(3));
    CHECK(near(r3.residual, T(0), 1e-12));
    std::vector<std::size_t> sorted = r3.assignment;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::size_t>{0, 1, 2});
  }

  TEST_CASE("0/1 weights are already optimal") {
    testing::Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
      const auto m = testing::uniform_index(rng, 1, 8);
      const auto p = testing::uniform_index(rng, 1, 3);
      auto g = testing::random_grid<double>(rng, m, SpaceMode::Atomic);
      auto C = testing::random_partition(rng, m, 3);
      auto alpha = SimpleFunction<double>::zeros(m, p);
      for (std::size_t k = 0; k < m; ++k) alpha(k, testing::uniform_index(rng, 0, p - 1)) = 1.0;
      auto r = oracle::enumerate_atomic_partitions(g, p, testing::random_function<double>(rng, m, 2), alpha, C);
      CHECK(r.residual <= 1e-12);
    }
  }

  TEST_CASE("enumeration budget") {
    auto g = Grid<double>::build(std::vector<double>(30, 1.0), SpaceMode::Atomic);
    CHECK_THROWS_AS(oracle::enumerate_atomic_partitions(g, 2, SimpleFunction<double>::constant(30, {1.0}),
                                                        SimpleFunction<double>::constant(30, {0.5, 0.5}),
                                                        BlockPartition::trivial(30)),
                    InvalidArgument);
  }

  TEST_CASE_TEMPLATE("direct integration agrees with condexp", T, double, Rational) {
    testing::Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
      const auto m = testing::uniform_index(rng, 1, 20);
      auto g = testing::random_grid<T>(rng, m, SpaceMode::Splittable);
      auto C = testing::random_partition(rng, m, 5);
      auto f = testing::random_function<T>(rng, m, 2);
      auto E = testing::random_set(rng, g);
      CHECK(near(max_abs_difference(oracle::direct_integrate(f, E, C, g), weighted_ce_measure(f, E, C, g)), T(0),
                 1e-9));
    }
    auto g = Grid<T>::build(std::vector<T>(3, T(1)), SpaceMode::Splittable);
    auto C = BlockPartition({0, 1, 1});
    CHECK(max_abs(oracle::direct_integrate(SimpleFunction<T>::zeros(3, 1), RefinedSet<T>::whole(g), C, g)) == T(0));
    auto one = oracle::direct_integrate(SimpleFunction<T>::constant(3, {T(1)}), RefinedSet<T>::whole(g), C, g);
    CHECK(one(0, 0) == T(1));
    CHECK(one(1, 0) == T(1));
  }
}
