// Ball geometry, shell-tree construction, point location, ring-quotient
// distances, and the tree's serialization / cache round-trips.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "carleson/ball.hpp"
#include "carleson/bergman_tree.hpp"
#include "carleson/io.hpp"
#include "carleson/rng.hpp"

using namespace carleson;

namespace {

const BergmanTree& ball_tree(int n, int depth) {
  // deque: growth never relocates entries already handed out by reference
  static std::deque<std::pair<std::pair<int, int>, BergmanTree>> cache;
  for (auto& [key, bt] : cache)
    if (key.first == n && key.second == depth) return bt;
  BergmanTreeOptions o;
  o.n = n;
  o.max_depth = depth;
  cache.push_back({{n, depth}, cached_bergman_tree(o)});
  return cache.back().second;
}

CVec ball_point(Rng& rng, int n, double rmax) {
  CVec z(n);
  for (int k = 0; k < n; ++k) z(k) = rng.complex_gaussian();
  z /= std::sqrt(abs2(z));
  return (rmax * std::pow(rng.uniform(), 1.0 / (2.0 * n))) * z;
}

}  // namespace

TEST_CASE("invariant metric from the origin is the radial arctanh") {
  Rng rng(3);
  const CVec zero = CVec::Zero(2);
  for (int it = 0; it < 20; ++it) {
    const CVec z = ball_point(rng, 2, 0.95);
    const double r = std::sqrt(abs2(z));
    CHECK(bergman_metric(zero, z) == doctest::Approx(std::atanh(r)).epsilon(1e-12));
  }
}

TEST_CASE("mobius involution swaps its parameters and is an involution") {
  Rng rng(4);
  for (int it = 0; it < 10; ++it) {
    const CVec a = ball_point(rng, 2, 0.9);
    const CVec z = ball_point(rng, 2, 0.9);
    CHECK(std::sqrt(abs2(mobius(a, a))) < 1e-12);
    CHECK(std::sqrt(abs2(mobius(a, CVec::Zero(2)) - a)) < 1e-12);
    CHECK(std::sqrt(abs2(mobius(a, mobius(a, z)) - z)) < 1e-10);
    // the metric is mobius invariant
    const CVec w = ball_point(rng, 2, 0.9);
    CHECK(bergman_metric(mobius(a, z), mobius(a, w)) ==
          doctest::Approx(bergman_metric(z, w)).epsilon(1e-9));
  }
}

TEST_CASE("haar rotations are unitary and deterministic per seed") {
  Rng r1(9), r2(9);
  const CMat u1 = haar_unitary(3, r1);
  const CMat u2 = haar_unitary(3, r2);
  CHECK((u1 - u2).norm() == 0.0);
  CHECK((u1.adjoint() * u1 - CMat::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("tent over the origin is everything; tents shrink toward the boundary") {
  Rng rng(11);
  const CVec origin = CVec::Zero(2);
  for (int it = 0; it < 10; ++it)
    CHECK(tent_membership(ball_point(rng, 2, 0.97), origin));
  // a point far from w's direction is outside a near-boundary tent
  CVec w = CVec::Zero(2);
  w(0) = 0.9;
  CVec z = CVec::Zero(2);
  z(1) = 0.5;
  CHECK(!tent_membership(z, w));
  CHECK(tent_membership(0.95 * w, w));
}

TEST_CASE("node count estimate is monotone and reports the refusal size") {
  CHECK(estimate_bergman_tree_nodes(2, 5) < estimate_bergman_tree_nodes(2, 6));
  CHECK(estimate_bergman_tree_nodes(1, 8) < estimate_bergman_tree_nodes(2, 8));
  CHECK(estimate_bergman_tree_nodes(8, 40) ==
        std::numeric_limits<std::int64_t>::max());
  BergmanTreeOptions o;
  o.n = 2;
  o.max_depth = 6;
  o.max_nodes = 100;
  CHECK_THROWS_AS(build_bergman_tree(o), std::length_error);
}

TEST_CASE("disk tree: one ring per level, located exactly") {
  const BergmanTree& bt = ball_tree(1, 6);
  for (std::size_t lvl = 0; lvl < bt.rings_by_level.size(); ++lvl)
    CHECK(bt.rings_by_level[lvl].size() == 1);
  for (NodeId v = 0; v < static_cast<NodeId>(bt.size()); ++v)
    CHECK(locate(bt, bt.center[v]) == v);
}

TEST_CASE("ball tree kube membership: every center locates to its own node") {
  const BergmanTree& bt = ball_tree(2, 6);
  for (NodeId v = 0; v < static_cast<NodeId>(bt.size()); ++v) {
    CHECK(locate(bt, bt.center[v], LocateRule::ring_first) == v);
    CHECK(locate(bt, bt.center[v], LocateRule::flat) == v);
  }
}

TEST_CASE("locate rejects boundary points and refuses past the last shell") {
  const BergmanTree& bt = ball_tree(2, 6);
  CVec z = CVec::Zero(2);
  z(0) = 1.0;
  CHECK_THROWS_AS(locate(bt, z), std::invalid_argument);
  z(0) = 0.9995;  // shell index far beyond depth 6
  CHECK_THROWS_AS(locate(bt, z), std::out_of_range);
}

TEST_CASE("rotated location matches locating the rotated point") {
  const BergmanTree& bt = ball_tree(2, 6);
  Rng rng(21);
  for (int it = 0; it < 50; ++it) {
    const CVec z = ball_point(rng, 2, std::tanh(6.4 * bt.theta));
    const CMat U = haar_unitary(2, rng);
    CHECK(locate_rotated(bt, z, U) == locate(bt, (U.adjoint() * z).eval()));
  }
}

TEST_CASE("ring quotient depth of a node tracks its level minus a fixed offset") {
  const BergmanTree& bt = ball_tree(2, 6);
  for (NodeId v = 0; v < static_cast<NodeId>(bt.size()); ++v) {
    const int q = bt.depth(v);
    const double s = d_star_self(bt, v);
    CHECK(s >= 0.0);
    CHECK(s <= q);
    if (q >= 4) {
      CHECK(s - (q - 2.5) >= -0.3);
      CHECK(s - (q - 2.5) <= 0.3);
    }
  }
}

TEST_CASE("same-orbit pairs are at quotient distance zero in both modes") {
  const BergmanTree& bt = ball_tree(2, 6);
  int tested = 0;
  for (const Ring& ring : bt.rings) {
    if (ring.npoints < 2 || tested > 20) continue;
    const NodeId a = ring.first_node;
    const NodeId b = ring.first_node + 1;
    CHECK(d_star_pair(bt, a, b, DStarMode::analytic) == 0.0);
    CHECK(d_star_pair(bt, a, b, DStarMode::sampled) == 0.0);
    ++tested;
  }
  CHECK(tested > 5);
}

TEST_CASE("grandparent-generation splits concentrate near quotient distance four") {
  const BergmanTree& bt = ball_tree(2, 6);
  // No band pairs split at the root: shallow quotient depths are clamped small.
  CHECK(grandk_pairs(bt, bt.tree.root(), 0).empty());
  // From generation three on they are plentiful.
  long at_depth3 = 0;
  for (NodeId g = 0; g < static_cast<NodeId>(bt.size()); ++g)
    if (bt.depth(g) == 3) at_depth3 += static_cast<long>(grandk_pairs(bt, g, 0).size());
  CHECK(at_depth3 >= 1000);
  // Distances of selected pairs sit in the band by construction; check a few
  // against the direct evaluation.
  int inspected = 0;
  for (NodeId g = 0; g < static_cast<NodeId>(bt.size()) && inspected < 50; ++g) {
    if (bt.depth(g) != 3) continue;
    for (const auto& [a, b] : grandk_pairs(bt, g, 0)) {
      if (inspected >= 50) break;
      const double p = d_star_pair(bt, a, b);
      CHECK(std::abs(p - 4.0) <= 0.5);
      ++inspected;
    }
  }
  CHECK(inspected == 50);
}

TEST_CASE("single-orbit levels admit no splitting pairs at all") {
  const BergmanTree& bt = ball_tree(1, 6);
  long total = 0;
  for (int k = 0; k <= 2; ++k)
    for (NodeId g = 0; g < static_cast<NodeId>(bt.size()); ++g)
      if (bt.depth(g) + k + 2 <= 6)
        total += static_cast<long>(grandk_pairs(bt, g, k).size());
  CHECK(total == 0);
}

TEST_CASE("analytic and sampled distances agree on the selected pairs") {
  const BergmanTree& bt = ball_tree(2, 6);
  int checked = 0, close = 0;
  for (NodeId g = 0; g < static_cast<NodeId>(bt.size()) && checked < 200; ++g) {
    if (bt.depth(g) < 3) continue;
    if (bt.depth(g) + 2 > 6) break;
    for (const auto& [a, b] : grandk_pairs(bt, g, 0)) {
      if (checked >= 200) break;
      const double pa = d_star_pair(bt, a, b, DStarMode::analytic);
      const double ps = d_star_pair(bt, a, b, DStarMode::sampled, 8, 1);
      ++checked;
      if (std::abs(pa - ps) <= 2.0) ++close;
    }
  }
  REQUIRE(checked == 200);
  CHECK(close >= 190);  // at least 95 percent
}

TEST_CASE("analytic wedge never runs more than 3.5 below the tree wedge") {
  const BergmanTree& bt = ball_tree(2, 6);
  Rng rng(42);
  for (int it = 0; it < 5000; ++it) {
    const NodeId a = static_cast<NodeId>(rng.index(bt.size()));
    const NodeId b = static_cast<NodeId>(rng.index(bt.size()));
    const int dw = bt.tree.depth(bt.tree.wedge(a, b));
    const double ds = d_star_wedge(bt, a, b);
    CHECK(dw - ds <= 3.5);
    // and it never exceeds either endpoint's quotient depth
    CHECK(ds <= std::min(d_star_self(bt, a), d_star_self(bt, b)) + 1e-12);
  }
}

TEST_CASE("serialized trees reload with identical geometry") {
  const BergmanTree& bt = ball_tree(2, 5);
  const BergmanTree re = bergman_tree_from_json(bergman_tree_to_json(bt));
  REQUIRE(re.size() == bt.size());
  REQUIRE(re.rings.size() == bt.rings.size());
  CHECK(re.n == bt.n);
  CHECK(re.theta == bt.theta);
  for (NodeId v = 0; v < static_cast<NodeId>(bt.size()); ++v) {
    CHECK((re.center[v] - bt.center[v]).norm() == 0.0);  // bitwise
    CHECK(re.ring_of[v] == bt.ring_of[v]);
    CHECK(re.tree.parent(v) == bt.tree.parent(v));
  }
  for (std::size_t r = 0; r < bt.rings.size(); ++r) {
    CHECK((re.rings[r].dir - bt.rings[r].dir).norm() == 0.0);  // bitwise
    CHECK(re.rings[r].radius == bt.rings[r].radius);
    CHECK(re.rings[r].npoints == bt.rings[r].npoints);
    CHECK(re.rings[r].parent == bt.rings[r].parent);
    CHECK(re.rings[r].first_node == bt.rings[r].first_node);
    CHECK(re.ring_tree.parent(static_cast<NodeId>(r)) ==
          bt.ring_tree.parent(static_cast<NodeId>(r)));
  }
  // location decisions agree between built and reloaded trees
  Rng rng(8);
  for (int it = 0; it < 200; ++it) {
    const CVec z = ball_point(rng, 2, std::tanh(5.4 * bt.theta));
    CHECK(locate(bt, z) == locate(re, z));
  }
}

TEST_CASE("tampered ring tables are rejected on load") {
  const BergmanTree& bt = ball_tree(2, 5);
  auto j = bergman_tree_to_json(bt);
  j["rings"][0]["npoints"] = j["rings"][0]["npoints"].get<int>() + 1;
  CHECK_THROWS_AS(bergman_tree_from_json(j), std::invalid_argument);
}

TEST_CASE("cache round trip returns the built geometry bit for bit") {
  if (cache_dir().empty()) return;  // cache disabled in this environment
  BergmanTreeOptions o;
  o.n = 2;
  o.max_depth = 4;
  const BergmanTree first = cached_bergman_tree(o);   // builds, then saves
  const BergmanTree second = cached_bergman_tree(o);  // loads the file
  REQUIRE(second.size() == first.size());
  for (NodeId v = 0; v < static_cast<NodeId>(first.size()); ++v)
    CHECK((second.center[v] - first.center[v]).norm() == 0.0);
  for (std::size_t r = 0; r < first.rings.size(); ++r)
    CHECK((second.rings[r].dir - first.rings[r].dir).norm() == 0.0);
}

TEST_CASE("projective orbit metric: zero on the diagonal, symmetric, positive apart") {
  Rng rng(5);
  CVec u(2), v(2);
  u(0) = 1.0;
  u(1) = 0.0;
  v(0) = 0.0;
  v(1) = 1.0;
  CHECK(projective_circle_metric(u, u, 0.7) == doctest::Approx(0.0).epsilon(1e-10));
  const double duv = projective_circle_metric(u, v, 0.7);
  const double dvu = projective_circle_metric(v, u, 0.7);
  CHECK(duv == doctest::Approx(dvu).epsilon(1e-9));
  CHECK(duv > 0.5);
  // phase changes of a direction do not move its orbit
  CVec up = u * std::polar(1.0, 1.234);
  CHECK(projective_circle_metric(u, up, 0.7) < 1e-9);
}
