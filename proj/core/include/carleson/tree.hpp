#pragma once
// Rooted combinatorial trees. Nodes are dense ids 0..size-1; children lists
// are kept sorted ascending so that every accumulation pass has one canonical
// (and therefore bit-reproducible) order.

#include <cstdint>
#include <string>
#include <vector>

namespace carleson {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

class Tree {
 public:
  Tree() = default;

  // parents[i] is the parent of node i, kNoNode exactly for the root.
  static Tree from_parents(const std::vector<NodeId>& parents);
  // Path with n nodes: 0 -> 1 -> ... -> n-1, rooted at 0.
  static Tree linear(int n);
  // Complete binary tree with the given depth (2^{depth+1}-1 nodes).
  static Tree full_binary(int depth);

  std::size_t size() const { return parent_.size(); }
  NodeId root() const { return root_; }
  NodeId parent(NodeId v) const { return parent_[v]; }
  int depth(NodeId v) const { return depth_[v]; }
  int max_depth() const { return max_depth_; }
  const std::vector<NodeId>& children(NodeId v) const { return children_[v]; }
  bool is_leaf(NodeId v) const { return children_[v].empty(); }

  // Ancestor at the given depth (walks up); requires at_depth <= depth(v).
  NodeId ancestor_at(NodeId v, int at_depth) const;
  // True if a lies on the root path of v (a <= v in the tree order).
  bool is_ancestor_or_self(NodeId a, NodeId v) const;
  // Deepest common ancestor.
  NodeId wedge(NodeId a, NodeId b) const;
  // Geodesic distance d(a,b) = d(a) + d(b) - 2 d(a ^ b).
  int distance(NodeId a, NodeId b) const;

  // Node ids listed so that every node appears after its parent.
  const std::vector<NodeId>& topological_order() const { return topo_; }

 private:
  void finish();  // builds children/depths/topo from parent_

  std::vector<NodeId> parent_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<int> depth_;
  std::vector<NodeId> topo_;
  NodeId root_ = kNoNode;
  int max_depth_ = 0;
};

// I f(alpha)  = sum of f over the root path of alpha (ancestors and alpha).
// I* f(alpha) = sum of f over the subtree rooted at alpha.
std::vector<double> tree_sum_I(const Tree& t, const std::vector<double>& f);
std::vector<double> tree_sum_Istar(const Tree& t, const std::vector<double>& f);

}  // namespace carleson
