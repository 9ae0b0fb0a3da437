#pragma once
// The tree of shell kubes on the unit ball of C^n. Levels are Bergman-metric
// shells of width theta = (ln 2)/2; level-N kube centers sit on the mid-shell
// radius tanh((N+1/2) theta). Each level carries a set of circle orbits
// ("rings"): unit directions selected as a greedily maximal 1-separated net
// in the circle-invariant metric, each populated with equally spaced points
// at unit Bergman spacing. Children attach by radial projection into the
// parent level, constrained to the parent ring, which makes the quotient map
// onto the ring tree monotone edge by edge.

#include <cstdint>
#include <utility>
#include <vector>

#include "carleson/ball.hpp"
#include "carleson/tree.hpp"
#include "carleson/tree_measure.hpp"

namespace carleson {

enum class LocateRule {
  ring_first,  // shell, then nearest ring, then nearest point on the circle
  flat         // shell, then nearest center outright (validation rule)
};

enum class DStarMode { analytic, sampled };

enum class PairPredicate {
  exact_band,  // |d*(pair) - 4| <= tau
  at_least     // d*(pair) >= 2
};

struct BergmanTreeOptions {
  int n = 2;
  int max_depth = 6;
  std::uint64_t seed = 20260818ull;
  double pool_base = 64.0;            // candidate pool ~ pool_base * 2^{nN}
  std::int64_t pool_cap = 1 << 17;    // per-level cap on the candidate pool
  std::int64_t max_nodes = 2'000'000;
};

struct Ring {
  std::int32_t id = 0;
  int level = 0;
  std::int32_t parent = -1;  // ring id
  CVec dir;                  // unit direction of the orbit
  double radius = 0.0;       // mid-shell radius of the level
  std::int32_t npoints = 1;  // members, equally spaced angles 2 pi j / npoints
  NodeId first_node = 0;     // members have contiguous ids
};

class BergmanTree {
 public:
  Tree tree;
  Tree ring_tree;
  std::vector<CVec> center;            // per node
  std::vector<std::int32_t> ring_of;   // node -> ring id
  std::vector<Ring> rings;
  std::vector<std::vector<std::int32_t>> rings_by_level;
  int n = 2;
  double theta = 0.0;
  double lambda = 1.0;
  BergmanTreeOptions opts;

  int depth(NodeId v) const { return tree.depth(v); }
  std::size_t size() const { return tree.size(); }
  const Ring& ring(std::int32_t id) const {
    return rings[static_cast<std::size_t>(id)];
  }
  // Center angle index -> node id within a ring.
  NodeId ring_member(const Ring& r, std::int64_t j) const {
    const std::int64_t m = r.npoints;
    return r.first_node + static_cast<NodeId>(((j % m) + m) % m);
  }
};

// Rough upper bound on the node count of a build, used for refusal before
// construction starts.
std::int64_t estimate_bergman_tree_nodes(int n, int max_depth);

// Deterministic construction; throws std::length_error when the node count
// would exceed opts.max_nodes.
BergmanTree build_bergman_tree(const BergmanTreeOptions& opts);

// Kube membership of a point of the open ball. Throws std::out_of_range when
// the point's shell lies beyond max_depth. `rotate_by_adjoint`: when locating
// into a virtually rotated tree U.T, pass U and the point is pulled back.
NodeId locate(const BergmanTree& bt, const CVec& z,
              LocateRule rule = LocateRule::ring_first);
NodeId locate_rotated(const BergmanTree& bt, const CVec& z, const CMat& U,
                      LocateRule rule = LocateRule::ring_first);

// Quotient depth of a single ring: -log2(1 - |c_v|^4) clamped to
// [0, depth(v)]. At this tree's shell radii it sits about 2.5 below the
// integer depth; it is the self-consistent endpoint for the analytic pair
// distance below.
double d_star_self(const BergmanTree& bt, NodeId v);

// Shared-ancestor depth surrogate for the ring quotient ("wedge depth").
// analytic: -log2(1 - |herm(c_a, c_b)|^2) clamped so it never exceeds either
// endpoint's quotient depth, with same-ring pairs mapped to the smaller
// endpoint (their orbits coincide, distance zero). sampled: deepest ring-tree
// wedge over `samples` relocations (sample 0 is the identity, the rest Haar
// rotations), realizing the infimum of the relocated pair distance over the
// rotation group.
double d_star_wedge(const BergmanTree& bt, NodeId a, NodeId b,
                    DStarMode mode = DStarMode::analytic, int samples = 8,
                    std::uint64_t seed = 1);

// Quotient distance d*([a],[b]) = d*([a]) + d*([b]) - 2 * wedge, with
// endpoints matching the wedge's mode: quotient depths for analytic, integer
// ring levels for sampled. Zero for same-ring pairs in both modes; two rings
// that branch exactly at the shared grandparent generation sit near 4.
double d_star_pair(const BergmanTree& bt, NodeId a, NodeId b,
                   DStarMode mode = DStarMode::analytic, int samples = 8,
                   std::uint64_t seed = 1);

// Pairs (d, d') of depth d(gamma)+k+2 descendants of gamma that split at
// gamma, whose grandparents share a ring, and whose quotient distance passes
// the predicate (exact_band with tolerance tau, or at_least >= 2). Pairs are
// returned once each with d < d'. When `restrict` is given, only nodes of its
// closure are considered. Throws std::out_of_range if the tree is shallower
// than d(gamma)+k+2.
std::vector<std::pair<NodeId, NodeId>> grandk_pairs(
    const BergmanTree& bt, NodeId gamma, int k, double tau = 0.5,
    PairPredicate pred = PairPredicate::exact_band,
    const TreeMeasure* restrict_to = nullptr);

}  // namespace carleson
