#pragma once
// A nonnegative weight on the nodes of a tree, stored sparsely: only the
// support and its ancestor closure are materialized, together with a cached
// table of subtree sums I*mu on the closure. The closure is exactly the set
// where I*mu > 0, so sums "over all beta >= alpha" reduce to closure sums.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "carleson/tree.hpp"

namespace carleson {

class TreeMeasure {
 public:
  TreeMeasure() = default;
  // weights: (node, mass) pairs; masses must be >= 0, nodes distinct.
  TreeMeasure(const Tree& tree, const std::vector<std::pair<NodeId, double>>& weights);

  static TreeMeasure from_dense(const Tree& tree, const std::vector<double>& w);

  const Tree& tree() const { return *tree_; }

  double mass(NodeId v) const {
    auto it = index_.find(v);
    return it == index_.end() ? 0.0 : mass_[it->second];
  }
  double istar(NodeId v) const {
    auto it = index_.find(v);
    return it == index_.end() ? 0.0 : istar_[it->second];
  }
  bool in_closure(NodeId v) const { return index_.count(v) != 0; }

  double total_mass() const { return closure_.empty() ? 0.0 : istar_front_; }

  // Closure nodes sorted ascending by id (deterministic iteration order).
  const std::vector<NodeId>& closure() const { return closure_; }
  // Children lists restricted to the closure, ascending ids.
  const std::vector<NodeId>& closure_children(NodeId v) const;
  // Closure nodes listed parents-before-children.
  const std::vector<NodeId>& closure_topological() const { return topo_; }

  // Recomputes the I* table from scratch (children accumulated in ascending
  // id order); used by tests to pin bit-identical reproducibility.
  std::vector<double> recompute_istar() const;

  // Restriction of the measure to leaves of the tree (drops interior mass).
  TreeMeasure boundary_part() const;

 private:
  const Tree* tree_ = nullptr;
  std::vector<NodeId> closure_;                  // ascending ids
  std::vector<NodeId> topo_;                     // parents first
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<double> mass_;    // by closure index
  std::vector<double> istar_;   // by closure index
  std::vector<std::vector<NodeId>> kids_;        // closure adjacency
  double istar_front_ = 0.0;    // I* at the shallowest closure node (root path top)
};

// Convenience: measure with a single unit atom at the given node.
TreeMeasure dirac_measure(const Tree& tree, NodeId at, double m = 1.0);

}  // namespace carleson
