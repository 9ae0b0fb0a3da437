#include "carleson/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace carleson {

Tree Tree::from_parents(const std::vector<NodeId>& parents) {
  Tree t;
  t.parent_ = parents;
  t.finish();
  return t;
}

Tree Tree::linear(int n) {
  std::vector<NodeId> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i - 1;
  if (n > 0) p[0] = kNoNode;
  return from_parents(p);
}

Tree Tree::full_binary(int depth) {
  std::size_t n = (std::size_t{1} << (depth + 1)) - 1;
  std::vector<NodeId> p(n);
  p[0] = kNoNode;
  for (std::size_t i = 1; i < n; ++i)
    p[i] = static_cast<NodeId>((i - 1) / 2);
  return from_parents(p);
}

void Tree::finish() {
  const std::size_t n = parent_.size();
  children_.assign(n, {});
  depth_.assign(n, -1);
  topo_.clear();
  topo_.reserve(n);
  root_ = kNoNode;
  max_depth_ = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const NodeId p = parent_[i];
    if (p == kNoNode) {
      if (root_ != kNoNode) throw std::invalid_argument("tree: two roots");
      root_ = static_cast<NodeId>(i);
    } else {
      if (p < 0 || static_cast<std::size_t>(p) >= n)
        throw std::invalid_argument("tree: parent id out of range");
      children_[static_cast<std::size_t>(p)].push_back(
          static_cast<NodeId>(i));
    }
  }
  if (n > 0 && root_ == kNoNode)
    throw std::invalid_argument("tree: no root");
  for (auto& c : children_) std::sort(c.begin(), c.end());

  // Iterative DFS in ascending-child order; assigns depths and checks
  // connectivity/acyclicity by counting visits.
  if (n == 0) return;
  std::vector<NodeId> stack{root_};
  depth_[static_cast<std::size_t>(root_)] = 0;
  std::size_t visited = 0;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    topo_.push_back(v);
    ++visited;
    const int dv = depth_[static_cast<std::size_t>(v)];
    max_depth_ = std::max(max_depth_, dv);
    const auto& ch = children_[static_cast<std::size_t>(v)];
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) {
      depth_[static_cast<std::size_t>(*it)] = dv + 1;
      stack.push_back(*it);
    }
  }
  if (visited != n)
    throw std::invalid_argument("tree: disconnected or cyclic parent array");
}

NodeId Tree::ancestor_at(NodeId v, int at_depth) const {
  while (depth(v) > at_depth) v = parent(v);
  if (depth(v) != at_depth)
    throw std::invalid_argument("ancestor_at: target depth below node");
  return v;
}

bool Tree::is_ancestor_or_self(NodeId a, NodeId v) const {
  if (depth(a) > depth(v)) return false;
  return ancestor_at(v, depth(a)) == a;
}

NodeId Tree::wedge(NodeId a, NodeId b) const {
  if (depth(a) > depth(b)) a = ancestor_at(a, depth(b));
  if (depth(b) > depth(a)) b = ancestor_at(b, depth(a));
  while (a != b) {
    a = parent(a);
    b = parent(b);
  }
  return a;
}

int Tree::distance(NodeId a, NodeId b) const {
  const NodeId w = wedge(a, b);
  return depth(a) + depth(b) - 2 * depth(w);
}

std::vector<double> tree_sum_I(const Tree& t, const std::vector<double>& f) {
  std::vector<double> out(f.size(), 0.0);
  for (const NodeId v : t.topological_order()) {
    const NodeId p = t.parent(v);
    out[static_cast<std::size_t>(v)] =
        f[static_cast<std::size_t>(v)] +
        (p == kNoNode ? 0.0 : out[static_cast<std::size_t>(p)]);
  }
  return out;
}

std::vector<double> tree_sum_Istar(const Tree& t,
                                   const std::vector<double>& f) {
  std::vector<double> out = f;
  const auto& topo = t.topological_order();
  // Children carry ascending ids and are visited after their parent in topo
  // order, so the reverse sweep accumulates each child exactly once; the
  // per-node loop below re-adds children in ascending id order to keep the
  // floating-point association canonical.
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const NodeId v = *it;
    double acc = f[static_cast<std::size_t>(v)];
    for (const NodeId c : t.children(v))
      acc += out[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(v)] = acc;
  }
  return out;
}

}  // namespace carleson
