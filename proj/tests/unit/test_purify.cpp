#include <doctest.h>

#include "condbb/oracle.hpp"
#include "condbb/purify.hpp"
#include "support/checks.hpp"
#include "support/random_instances.hpp"

using namespace condbb;
using condbb::testing::near;

namespace {

template <class T>
Grid<T> uniform(std::size_t m) {
  return Grid<T>::build(std::vector<T>(m, T(1)), SpaceMode::Splittable);
}

template <class T>
IntegrandFamily<T> scalar_family(std::size_t cells, std::vector<int> values) {
  std::vector<std::vector<Point<T>>> v(cells);
  for (auto& cell : v)
    for (int x : values) cell.push_back({T(x)});
  return IntegrandFamily<T>(1, std::move(v));
}

template <class T>
YoungMeasure<T> constant_young(std::size_t cells, std::vector<T> probs) {
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < probs.size(); ++a) labels.push_back(std::string(1, static_cast<char>('a' + a)));
  return YoungMeasure<T>(labels, SimpleFunction<T>::constant(cells, probs));
}

// E(f.V|𝒞) for a pure strategy, from raw interval masses.
template <class T>
BlockFunction<T> pure_payoff(const PureStrategy<T>& s, const IntegrandFamily<T>& V, const BlockPartition& C,
                             const Grid<T>& grid) {
  std::vector<SimpleFunction<T>> values;
  for (const auto& choice : s.action) values.push_back(V.along(choice));
  return oracle::direct_integrate(values, s.pieces, C, grid);
}

}  // namespace

TEST_SUITE("purify") {
  TEST_CASE_TEMPLATE("barycenter examples", T, double, Rational) {
    auto g = uniform<T>(2);
    auto V = scalar_family<T>(2, {0, 1});
    auto dirac = constant_young<T>(2, {T(0), T(1)});
    CHECK(barycenter(dirac, V, g) == SimpleFunction<T>::constant(2, {T(1)}));
    auto mixed = constant_young<T>(2, {T(3) / T(10), T(7) / T(10)});
    CHECK(near(barycenter(mixed, V, g)(0, 0), T(7) / T(10)));
    auto sym = scalar_family<T>(2, {-3, 3});
    auto fair = constant_young<T>(2, {T(1) / T(2), T(1) / T(2)});
    CHECK(barycenter(fair, sym, g)(1, 0) == T(0));
  }

  TEST_CASE_TEMPLATE("support polytopes", T, double, Rational) {
    auto g = uniform<T>(1);
    auto V = scalar_family<T>(1, {0, 1, 5});
    CHECK(support_polytope(constant_young<T>(1, {T(1) / T(3), T(1) / T(3), T(1) / T(3)}), V, g).vertices(0).size() ==
          3);
    CHECK(support_polytope(constant_young<T>(1, {T(0), T(1), T(0)}), V, g).vertices(0).size() == 1);
    CHECK(support_polytope(constant_young<T>(1, {T(1) / T(2), T(1) / T(2), T(0)}), V, g).vertices(0).size() == 2);
  }

  TEST_CASE("young measure validation") {
    CHECK_THROWS_AS(constant_young<double>(1, {0.5, 0.6}), PreconditionError);
    CHECK_THROWS_AS(constant_young<double>(1, {1.5, -0.5}), PreconditionError);
    CHECK_THROWS_AS(YoungMeasure<double>({"a", "a"}, SimpleFunction<double>::constant(1, {0.5, 0.5})),
                    InvalidArgument);
    CHECK_THROWS_AS(YoungMeasure<double>({}, SimpleFunction<double>::constant(1, {1.0})), InvalidArgument);
  }

  TEST_CASE_TEMPLATE("purify examples", T, double, Rational) {
    auto g = uniform<T>(4);
    auto trivial = BlockPartition::trivial(4);
    auto V = scalar_family<T>(4, {0, 1});

    auto dirac = constant_young<T>(4, {T(0), T(1)});
    auto pure = purify(dirac, V, trivial, g);
    CHECK(pure.max_deviation == T(0));
    for (std::size_t k = 0; k < 4; ++k) CHECK(pure.strategy.action[0][k] == 1);
    CHECK(pure.strategy.pieces[0] == RefinedSet<T>::whole(g));

    auto mixed = constant_young<T>(4, {T(3) / T(10), T(7) / T(10)});
    auto r = purify(mixed, V, trivial, g);
    CHECK(near(r.pure_side(0, 0), T(7) / T(10), 1e-12));
    T mass_b(0), mass_a(0);
    for (std::size_t i = 0; i < r.strategy.pieces.size(); ++i)
      for (std::size_t k = 0; k < 4; ++k)
        (r.strategy.action[i][k] == 1 ? mass_b : mass_a) += r.strategy.pieces[i].mass_in(k);
    CHECK(near(mass_b, T(7) / T(10), 1e-12));
    CHECK(near(mass_a, T(3) / T(10), 1e-12));
    CHECK(near(max_abs_difference(pure_payoff(r.strategy, V, trivial, g), r.mixed_side), T(0), 1e-12));

    // an unsupported action with an extreme value is never chosen
    auto V3 = scalar_family<T>(4, {0, 1, 9});
    auto no_c = constant_young<T>(4, {T(1) / T(2), T(1) / T(2), T(0)});
    auto r3 = purify(no_c, V3, trivial, g);
    for (const auto& row : r3.strategy.action)
      for (auto a : row) CHECK(a != 2);
  }

  TEST_CASE_TEMPLATE("random purification", T, double, Rational) {
    testing::Rng rng(31);
    for (int trial = 0; trial < (NumTraits<T>::exact ? 20 : 80); ++trial) {
      const auto m = testing::uniform_index(rng, 1, 16);
      auto inst = testing::random_young_instance<T>(rng, m, testing::uniform_index(rng, 1, 6),
                                                    testing::uniform_index(rng, 1, 3), 4, SpaceMode::Splittable);
      auto r = purify(inst.delta, inst.V, inst.partition, inst.grid);
      CHECK(near(r.max_deviation, T(0), 1e-8));
      for (std::size_t i = 0; i < r.strategy.pieces.size(); ++i)
        for (std::size_t k = 0; k < m; ++k)
          if (r.strategy.pieces[i].mass_in(k) > T(0)) CHECK(inst.delta.supports(k, r.strategy.action[i][k]));
      CHECK(near(max_abs_difference(pure_payoff(r.strategy, inst.V, inst.partition, inst.grid), r.mixed_side), T(0),
                 1e-8));
      // barycenter containment
      auto poly = support_polytope(inst.delta, inst.V, inst.grid);
      auto bar = barycenter(inst.delta, inst.V, inst.grid);
      for (std::size_t k = 0; k < m; ++k)
        CHECK(hull_membership(Point<T>(bar.at(k).begin(), bar.at(k).end()), poly.vertices(k)).inside);
    }
  }

  TEST_CASE_TEMPLATE("purifying a pure strategy returns it", T, double, Rational) {
    testing::Rng rng(32);
    for (int trial = 0; trial < 20; ++trial) {
      const auto m = testing::uniform_index(rng, 1, 10);
      auto inst = testing::random_young_instance<T>(rng, m, 3, 2, 3, SpaceMode::Splittable);
      auto first = purify(inst.delta, inst.V, inst.partition, inst.grid);
      // the output as a Dirac Young measure on the grid cut at its pieces
      auto cut = split_cells(inst.grid, std::span<const RefinedSet<T>>(first.strategy.pieces));
      std::vector<std::size_t> choice(cut.grid.size());
      std::vector<std::vector<Point<T>>> values(cut.grid.size());
      for (std::size_t c = 0; c < cut.grid.size(); ++c) {
        for (std::size_t i = 0; i < first.strategy.pieces.size(); ++i)
          if (cut.lift(first.strategy.pieces[i]).mass_in(c) > T(0)) choice[c] = first.strategy.action[i][cut.parent[c]];
        for (std::size_t a = 0; a < 3; ++a) values[c].push_back(inst.V(cut.parent[c], a));
      }
      auto dirac = YoungMeasure<T>::dirac(inst.delta.actions(), choice);
      auto V = IntegrandFamily<T>(2, values);
      auto C = cut.lift(inst.partition);
      auto second = purify(dirac, V, C, cut.grid);
      CHECK(second.max_deviation == T(0));
      CHECK(second.strategy.pieces[0] == RefinedSet<T>::whole(cut.grid));
      CHECK(second.strategy.action[0] == choice);
    }
  }

  TEST_CASE_TEMPLATE("density steps for finite families", T, double, Rational) {
    auto g = uniform<T>(8);
    auto trivial = BlockPartition::trivial(8);
    auto delta = constant_young<T>(8, {T(1) / T(4), T(1) / T(4), T(1) / T(2)});
    auto constant = SimpleFunction<T>::constant(8, {T(1), T(1), T(1)});
    auto r = density_step(delta, {constant}, trivial, g);
    CHECK(r.max_deviation == T(0));

    auto indicator = SimpleFunction<T>::constant(8, {T(1), T(0), T(0)});
    auto r1 = density_step(delta, {indicator}, trivial, g);
    auto scalar = purify(delta, IntegrandFamily<T>::stack({indicator}), trivial, g);
    CHECK(r1.strategy.pieces == scalar.strategy.pieces);
    CHECK(near(r1.pure_side(0, 0), T(1) / T(4), 1e-12));

    testing::Rng rng(33);
    std::vector<SimpleFunction<T>> phis;
    for (int i = 0; i < 3; ++i) phis.push_back(testing::random_function<T>(rng, 8, 3));
    BlockPartition C({0, 0, 1, 1, 2, 2, 3, 3});
    auto r3 = density_step(delta, phis, C, g);
    CHECK(near(r3.max_deviation, T(0), 1e-9));
    CHECK(r3.mixed_side.dim() == 3);
  }
}
