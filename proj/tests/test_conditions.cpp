// Testing conditions: exact values on model measures, scaling and ordering
// laws, the splitting family on ball trees, and the disk-tree comparisons.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <deque>
#include <stdexcept>
#include <utility>
#include <vector>

#include "carleson/bergman_tree.hpp"
#include "carleson/conditions.hpp"
#include "carleson/disk_trees.hpp"
#include "carleson/io.hpp"
#include "carleson/measures.hpp"
#include "carleson/rng.hpp"

using namespace carleson;

namespace {

const BergmanTree& ball_tree(int n, int depth) {
  static std::deque<std::pair<std::pair<int, int>, BergmanTree>> cache;
  for (auto& [key, bt] : cache)
    if (key.first == n && key.second == depth) return bt;
  BergmanTreeOptions o;
  o.n = n;
  o.max_depth = depth;
  cache.push_back({{n, depth}, cached_bergman_tree(o)});
  return cache.back().second;
}

AtomicMeasure random_ball_measure(Rng& rng, int n, int count, double max_level,
                                  double theta) {
  AtomicMeasure mu;
  for (int i = 0; i < count; ++i) {
    CVec dir(n);
    for (int k = 0; k < n; ++k) dir(k) = rng.complex_gaussian();
    dir /= std::sqrt(abs2(dir));
    mu.push(std::tanh(rng.uniform(0.0, (max_level + 0.4) * theta)) * dir,
            0.05 + rng.uniform());
  }
  return mu;
}

}  // namespace

TEST_CASE("equal-split leaf measure: unit simple constant, linear tree constant") {
  for (int depth : {4, 6, 8, 10}) {
    Tree t = Tree::full_binary(depth);
    TreeMeasure mu = cantor_measure(t, depth);
    const auto s = simple_condition(mu, 0.5);
    const auto tr = tree_condition(mu, 0.5);
    CHECK(s.constant == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tr.constant == doctest::Approx(depth + 1.0).epsilon(1e-9));
  }
}

TEST_CASE("conditions scale linearly in the measure") {
  Tree t = Tree::full_binary(6);
  TreeMeasure mu = cantor_measure(t, 6);
  TreeMeasure mu3 = cantor_measure(t, 6, 0.5, 0.5, 3.0);
  CHECK(simple_condition(mu3, 0.5).constant ==
        doctest::Approx(3.0 * simple_condition(mu, 0.5).constant).epsilon(1e-12));
  CHECK(tree_condition(mu3, 0.5).constant ==
        doctest::Approx(3.0 * tree_condition(mu, 0.5).constant).epsilon(1e-12));
}

TEST_CASE("simple constant is monotone in the exponent for deep measures") {
  Tree t = Tree::full_binary(8);
  TreeMeasure mu = cantor_measure(t, 8);
  CHECK(simple_condition(mu, 0.6).constant >=
        simple_condition(mu, 0.5).constant);
  CHECK(simple_condition(mu, 0.5).constant >=
        simple_condition(mu, 0.4).constant);
}

TEST_CASE("the tree condition dominates the simple condition") {
  Rng rng(13);
  const BergmanTree& bt = ball_tree(2, 6);
  for (int it = 0; it < 15; ++it) {
    AtomicMeasure atoms = random_ball_measure(rng, 2, 40, 6.0, bt.theta);
    TreeMeasure mu = discretize(atoms, bt);
    // the b = a term of the tree sum is the simple expression
    CHECK(simple_condition(mu, 0.5).constant <=
          tree_condition(mu, 0.5).constant * (1.0 + 1e-12));
  }
}

TEST_CASE("gauge of one reproduces the simple condition; gauges divide") {
  Tree t = Tree::full_binary(6);
  TreeMeasure mu = cantor_measure(t, 6);
  const auto plain = simple_condition(mu, 0.5);
  const auto unit = strengthened_simple(mu, 0.5, [](int) { return 1.0; }, "1");
  CHECK(unit.constant == doctest::Approx(plain.constant).epsilon(1e-13));
  const auto gauged =
      strengthened_simple(mu, 0.5, [](int d) { return 1.0 + d; }, "1+d");
  CHECK(gauged.constant <= plain.constant + 1e-13);
  CHECK(gauged.params.at("gauge") == "1+d");
}

TEST_CASE("power-sum condition: exponent one is the plain condition, exponents order") {
  Rng rng(29);
  const BergmanTree& bt = ball_tree(2, 6);
  AtomicMeasure atoms = random_ball_measure(rng, 2, 50, 6.0, bt.theta);
  TreeMeasure mu = discretize(atoms, bt);
  const auto p1 = lp_simple(mu, 0.5, 1.0);
  const auto s = simple_condition(mu, 0.5);
  CHECK(p1.constant == doctest::Approx(s.constant).epsilon(1e-12));
  // l^2 sums are dominated by l^1 sums
  CHECK(lp_simple(mu, 0.5, 2.0).constant <= p1.constant * (1.0 + 1e-12));
}

TEST_CASE("splitting condition needs orbit structure") {
  Tree t = Tree::full_binary(4);
  TreeMeasure mu = cantor_measure(t, 4);
  BergmanTree fake;
  fake.tree = t;
  fake.n = 2;
  CHECK_THROWS_AS(split_tree_condition(mu, fake), std::invalid_argument);
}

TEST_CASE("slice-supported measures have exactly zero splitting constant") {
  const BergmanTree& bt = ball_tree(2, 6);
  AtomicMeasure mu = curve_measure(slice_curve(2), 12, 24, 0.85, 1.0);
  TreeMeasure tm = discretize(mu, bt);
  CHECK(split_tree_condition(tm, bt).constant == 0.0);
  CHECK(tm.total_mass() > 0.0);
  CHECK(simple_condition(tm, 0.5).constant > 0.0);
}

TEST_CASE("one-orbit-per-level trees make the splitting condition vacuous") {
  const BergmanTree& b1 = ball_tree(1, 8);
  Rng rng(37);
  for (int it = 0; it < 3; ++it) {
    AtomicMeasure atoms = random_ball_measure(rng, 1, 30, 8.0, b1.theta);
    TreeMeasure mu = discretize(atoms, b1);
    CHECK(split_tree_condition(mu, b1).constant == 0.0);
  }
}

TEST_CASE("restricted and tail pieces bracket the splitting constant") {
  const BergmanTree& bt = ball_tree(2, 6);
  Rng rng(41);
  AtomicMeasure atoms = random_ball_measure(rng, 2, 80, 6.0, bt.theta);
  TreeMeasure mu = discretize(atoms, bt);
  const double full = split_tree_condition(mu, bt).constant;
  const double eps = epsilon_split_condition(mu, bt, 0.4).constant;
  const double tail = split_tail_condition(mu, bt, 0.4).constant;
  CHECK(eps <= full * (1.0 + 1e-12));
  CHECK(tail <= full * (1.0 + 1e-12));
  CHECK(full <= eps + tail + 1e-12);
  // the witness depth never exceeds the tree depth and is -1 when empty
  const int wd = epsilon_split_witness_depth(mu, bt, 0.4);
  CHECK(wd >= -1);
  CHECK(wd <= 6);
}

TEST_CASE("a single rotation sample is the identity evaluation") {
  const BergmanTree& bt = ball_tree(2, 6);
  Rng rng(43);
  AtomicMeasure atoms = random_ball_measure(rng, 2, 40, 6.0, bt.theta);
  const auto rot = rotated_max(atoms, bt, 1, 99, [&](const TreeMeasure& m) {
    return simple_condition(m, 0.5);
  });
  CHECK(rot.rotation_index == 0);
  CHECK(rot.rotations == 1);
  const double direct = simple_condition(discretize(atoms, bt), 0.5).constant;
  CHECK(rot.report.constant == doctest::Approx(direct).epsilon(1e-13));
  // more rotations can only increase the supremum
  const auto rot4 = rotated_max(atoms, bt, 4, 99, [&](const TreeMeasure& m) {
    return simple_condition(m, 0.5);
  });
  CHECK(rot4.report.constant >= rot.report.constant - 1e-13);
}

TEST_CASE("two-part estimate composes its parts") {
  const BergmanTree& bt = ball_tree(2, 6);
  Rng rng(47);
  AtomicMeasure atoms = random_ball_measure(rng, 2, 60, 6.0, bt.theta);
  TreeMeasure mu = discretize(atoms, bt);
  const auto est = drury_arveson_estimate(mu, bt);
  CHECK(est.simple_part ==
        doctest::Approx(std::sqrt(est.simple.constant)).epsilon(1e-13));
  CHECK(est.split_part ==
        doctest::Approx(std::sqrt(est.split.constant)).epsilon(1e-13));
  CHECK(est.combined ==
        doctest::Approx(est.simple_part + est.split_part).epsilon(1e-13));
  CHECK(est.simple.constant > 0.0);
}

TEST_CASE("closed-form radial conditions match the materialized tree") {
  const double rho = -0.75;
  const int depth = 8;
  DiskTree st = standard_disk_tree(depth);
  TreeMeasure mu = power_measure_disk(st, rho);
  const auto s_closed = power_simple_standard(rho, depth);
  const auto t_closed = power_tree_standard(rho, depth);
  const auto s_direct = simple_condition(mu, 0.5);
  const auto t_direct = tree_condition(mu, 0.5);
  CHECK(s_direct.constant == doctest::Approx(s_closed.constant).epsilon(1e-9));
  CHECK(t_direct.constant == doctest::Approx(t_closed.constant).epsilon(1e-9));
  // witness levels agree too
  CHECK(st.level_of(s_direct.witness) == s_closed.witness_level);
  CHECK(st.level_of(t_direct.witness) == t_closed.witness_level);
}

TEST_CASE("thin-level disk trees see radial power singularities that nested ones hide") {
  const double rho = -0.75;  // in (-1, -1/2): the counterexample window
  const int depth = 12;
  DiskTree st = standard_disk_tree(depth);
  DiskTree ft = fattened_disk_tree(depth);
  TreeMeasure ms = power_measure_disk(st, rho);
  TreeMeasure mf = power_measure_disk(ft, rho);
  const auto cmp = fattened_conditions(ms, mf, 0.5);
  // the nested tree condition is controlled by the thin-level one
  CHECK(cmp.t_standard.constant <= 32.0 * cmp.t_fattened.constant);
  CHECK(cmp.implication_ratio <= 32.0);
  // while the thin-level simple condition grows without bound in depth
  DiskTree ft2 = fattened_disk_tree(2 * depth);
  TreeMeasure mf2 = power_measure_disk(ft2, rho);
  const double s1 = simple_condition(mf, 0.5).constant;
  const double s2 = simple_condition(mf2, 0.5).constant;
  CHECK(s2 >= 1.3 * s1);
}

TEST_CASE("gauged-route implication checks report their pieces coherently") {
  Tree t = Tree::full_binary(8);
  TreeMeasure mu = cantor_measure(t, 8);
  const auto chk = simple_implies_tree_check(
      mu, 0.5, [](int d) { return 1.0 + d; }, 32.0, "1+d");
  CHECK(chk.route == "ssimp");
  CHECK(chk.tree_constant == doctest::Approx(9.0).epsilon(1e-9));
  CHECK(chk.ok == (chk.tree_constant <= chk.bound * chk.route_constant));
}
