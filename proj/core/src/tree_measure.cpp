#include "carleson/tree_measure.hpp"

#include <algorithm>
#include <stdexcept>

namespace carleson {

TreeMeasure::TreeMeasure(
    const Tree& tree, const std::vector<std::pair<NodeId, double>>& weights)
    : tree_(&tree) {
  std::unordered_map<NodeId, double> acc;
  for (const auto& [v, m] : weights) {
    if (m < 0.0) throw std::invalid_argument("TreeMeasure: negative mass");
    if (v < 0 || static_cast<std::size_t>(v) >= tree.size())
      throw std::invalid_argument("TreeMeasure: node out of range");
    if (m == 0.0) continue;
    acc[v] += m;
  }
  // Ancestor closure.
  std::unordered_map<NodeId, char> seen;
  for (const auto& [v, m] : acc) {
    NodeId u = v;
    while (u != kNoNode && !seen.count(u)) {
      seen[u] = 1;
      u = tree.parent(u);
    }
  }
  closure_.reserve(seen.size());
  for (const auto& [v, _] : seen) closure_.push_back(v);
  std::sort(closure_.begin(), closure_.end());

  index_.reserve(closure_.size());
  for (std::size_t i = 0; i < closure_.size(); ++i) index_[closure_[i]] = i;

  mass_.assign(closure_.size(), 0.0);
  for (const auto& [v, m] : acc) mass_[index_[v]] = m;

  kids_.assign(closure_.size(), {});
  for (const NodeId v : closure_) {
    const NodeId p = tree.parent(v);
    if (p != kNoNode) kids_[index_[p]].push_back(v);
  }
  for (auto& k : kids_) std::sort(k.begin(), k.end());

  topo_ = closure_;
  std::sort(topo_.begin(), topo_.end(), [&](NodeId a, NodeId b) {
    const int da = tree.depth(a), db = tree.depth(b);
    return da != db ? da < db : a < b;
  });

  istar_ = recompute_istar();
  if (!closure_.empty()) istar_front_ = istar_[index_.at(topo_.front())];
}

TreeMeasure TreeMeasure::from_dense(const Tree& tree,
                                    const std::vector<double>& w) {
  std::vector<std::pair<NodeId, double>> pairs;
  pairs.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] != 0.0) pairs.emplace_back(static_cast<NodeId>(i), w[i]);
  return TreeMeasure(tree, pairs);
}

const std::vector<NodeId>& TreeMeasure::closure_children(NodeId v) const {
  static const std::vector<NodeId> empty;
  auto it = index_.find(v);
  return it == index_.end() ? empty : kids_[it->second];
}

std::vector<double> TreeMeasure::recompute_istar() const {
  std::vector<double> out(closure_.size(), 0.0);
  for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
    const std::size_t i = index_.at(*it);
    double acc = mass_[i];
    for (const NodeId c : kids_[i]) acc += out[index_.at(c)];
    out[i] = acc;
  }
  return out;
}

TreeMeasure TreeMeasure::boundary_part() const {
  std::vector<std::pair<NodeId, double>> pairs;
  for (std::size_t i = 0; i < closure_.size(); ++i)
    if (mass_[i] > 0.0 && tree_->is_leaf(closure_[i]))
      pairs.emplace_back(closure_[i], mass_[i]);
  return TreeMeasure(*tree_, pairs);
}

TreeMeasure dirac_measure(const Tree& tree, NodeId at, double m) {
  return TreeMeasure(tree, {{at, m}});
}

}  // namespace carleson
