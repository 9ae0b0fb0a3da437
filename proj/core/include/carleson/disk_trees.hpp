#pragma once
// Dyadic-calibrated trees on the unit disk. Level N covers the annulus
// 1-2^{-N} <= |z| < 1-2^{-N-1} (the deepest level absorbs the cusp to the
// boundary). The standard tree has 2^N angular kubes per level (exactly
// nested), the fattened variant ceil(2^{N/2}); children attach to the kube
// containing their center angle. Radial power densities (1-|z|)^rho admit
// exact per-level masses, so the standard-tree subtree sums have closed forms
// at any depth without materializing the tree.

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "carleson/tree.hpp"
#include "carleson/tree_measure.hpp"

namespace carleson {

class DiskTree {
 public:
  Tree tree;
  int depth = 0;
  bool fattened = false;
  std::vector<std::int64_t> level_count;  // kubes per level
  std::vector<NodeId> level_first;        // first node id per level

  int level_of(NodeId v) const { return tree.depth(v); }
  std::int64_t index_of(NodeId v) const {
    return v - level_first[static_cast<std::size_t>(tree.depth(v))];
  }
  NodeId node_at(int level, std::int64_t j) const {
    const std::int64_t m = level_count[static_cast<std::size_t>(level)];
    return level_first[static_cast<std::size_t>(level)] +
           static_cast<NodeId>(((j % m) + m) % m);
  }
  // Kube containing (radius, angle); radii past the last annulus fall into
  // the deepest level (which owns the cusp).
  NodeId locate(double radius, double angle) const;
};

DiskTree standard_disk_tree(int depth);
DiskTree fattened_disk_tree(int depth);

// Projection of planar atoms (point, mass) onto the kubes of the tree.
TreeMeasure discretize_disk(
    const DiskTree& t,
    const std::vector<std::pair<std::complex<double>, double>>& atoms);

// integral of u^rho (1-u) du over [lo, hi]; the annulus mass at level N is
// 2*pi times this with [lo, hi] = [2^{-N-1}, 2^{-N}] (lo = 0 at the deepest
// level). Requires rho > -1.
double power_annulus_integral(double rho, double lo, double hi);

// Mass of one level-N kube of the given tree under (1-|z|)^rho dA.
double power_kube_mass(const DiskTree& t, double rho, int level);

// The measure itself (every node weighted); exact mass conservation by
// construction.
TreeMeasure power_measure_disk(const DiskTree& t, double rho);

// Closed forms on the standard tree, valid for any depth:
//   I* at a level-N node   = 2^{-N} * 2*pi * F(2^{-N})
// (exact nesting; the deepest level absorbs the cusp).
double power_istar_standard(double rho, int level);

struct RadialConditionResult {
  double constant = 0.0;
  int witness_level = 0;
};

// sup over levels of 2^{2 sigma N} I*(N) on the standard tree.
RadialConditionResult power_simple_standard(double rho, int depth,
                                            double sigma = 0.5);
// sup over levels N of sum_{k>=N} 2^{k-N} (2^{sigma k} I*(k))^2 / I*(N).
RadialConditionResult power_tree_standard(double rho, int depth,
                                          double sigma = 0.5);

}  // namespace carleson
