#include "carleson/disk_trees.hpp"

#include <cmath>
#include <stdexcept>

namespace carleson {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

DiskTree build_disk_tree(int depth, bool fattened) {
  if (depth < 0) throw std::invalid_argument("disk tree: depth >= 0");
  DiskTree t;
  t.depth = depth;
  t.fattened = fattened;
  std::vector<NodeId> parents;
  for (int N = 0; N <= depth; ++N) {
    const std::int64_t m =
        fattened ? static_cast<std::int64_t>(std::ceil(std::pow(2.0, N / 2.0)))
                 : (std::int64_t{1} << N);
    t.level_first.push_back(static_cast<NodeId>(parents.size()));
    t.level_count.push_back(m);
    for (std::int64_t j = 0; j < m; ++j) {
      if (N == 0) {
        parents.push_back(kNoNode);
      } else {
        const std::int64_t mp = t.level_count[static_cast<std::size_t>(N - 1)];
        // Kube of the previous level containing this kube's center angle.
        const double center = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
        std::int64_t p = static_cast<std::int64_t>(
            std::floor(center * static_cast<double>(mp)));
        if (p >= mp) p = mp - 1;
        parents.push_back(t.level_first[static_cast<std::size_t>(N - 1)] +
                          static_cast<NodeId>(p));
      }
    }
  }
  t.tree = Tree::from_parents(parents);
  return t;
}

}  // namespace

NodeId DiskTree::locate(double radius, double angle) const {
  if (radius < 0.0 || radius >= 1.0)
    throw std::invalid_argument("DiskTree::locate: radius in [0,1)");
  int N = 0;
  if (radius > 0.0) {
    N = static_cast<int>(std::floor(-std::log2(1.0 - radius)));
    if (N < 0) N = 0;
    if (N > depth) N = depth;  // the cusp belongs to the deepest annulus
  }
  double a = std::fmod(angle, kTwoPi);
  if (a < 0) a += kTwoPi;
  const std::int64_t m = level_count[static_cast<std::size_t>(N)];
  std::int64_t j = static_cast<std::int64_t>(
      std::floor(a / kTwoPi * static_cast<double>(m)));
  if (j >= m) j = m - 1;
  return node_at(N, j);
}

DiskTree standard_disk_tree(int depth) { return build_disk_tree(depth, false); }
DiskTree fattened_disk_tree(int depth) { return build_disk_tree(depth, true); }

double power_annulus_integral(double rho, double lo, double hi) {
  if (rho <= -1.0)
    throw std::invalid_argument("power_annulus_integral: rho > -1 required");
  auto F = [rho](double u) {
    if (u == 0.0) return 0.0;
    return std::pow(u, rho + 1.0) / (rho + 1.0) -
           std::pow(u, rho + 2.0) / (rho + 2.0);
  };
  return F(hi) - F(lo);
}

double power_kube_mass(const DiskTree& t, double rho, int level) {
  const double hi = std::pow(2.0, -level);
  const double lo = (level == t.depth) ? 0.0 : 0.5 * hi;
  const double annulus = kTwoPi * power_annulus_integral(rho, lo, hi);
  return annulus / static_cast<double>(
                       t.level_count[static_cast<std::size_t>(level)]);
}

TreeMeasure power_measure_disk(const DiskTree& t, double rho) {
  std::vector<std::pair<NodeId, double>> w;
  w.reserve(t.tree.size());
  for (int N = 0; N <= t.depth; ++N) {
    const double mass = power_kube_mass(t, rho, N);
    const std::int64_t m = t.level_count[static_cast<std::size_t>(N)];
    for (std::int64_t j = 0; j < m; ++j)
      w.emplace_back(t.node_at(N, j), mass);
  }
  return TreeMeasure(t.tree, w);
}

double power_istar_standard(double rho, int level) {
  const double u = std::pow(2.0, -level);
  return u * kTwoPi * power_annulus_integral(rho, 0.0, u);
}

RadialConditionResult power_simple_standard(double rho, int depth,
                                            double sigma) {
  RadialConditionResult res;
  for (int N = 0; N <= depth; ++N) {
    const double val =
        std::pow(2.0, 2.0 * sigma * N) * power_istar_standard(rho, N);
    if (val > res.constant) {
      res.constant = val;
      res.witness_level = N;
    }
  }
  return res;
}

RadialConditionResult power_tree_standard(double rho, int depth,
                                          double sigma) {
  // Suffix sums of 2^{k-N} (2^{sigma k} I*(k))^2, accumulated from the deep
  // end; by rotational symmetry the sup over nodes is a sup over levels.
  RadialConditionResult res;
  double suffix = 0.0;  // sum_k 2^k (2^{sigma k} I*(k))^2 for k >= N
  for (int N = depth; N >= 0; --N) {
    const double istar = power_istar_standard(rho, N);
    const double t = std::pow(2.0, sigma * N) * istar;
    suffix += std::pow(2.0, N) * t * t;
    if (istar > 0.0) {
      const double val = suffix * std::pow(2.0, -N) / istar;
      if (val > res.constant) {
        res.constant = val;
        res.witness_level = N;
      }
    }
  }
  return res;
}

}  // namespace carleson

namespace carleson {

TreeMeasure discretize_disk(
    const DiskTree& t,
    const std::vector<std::pair<std::complex<double>, double>>& atoms) {
  std::vector<std::pair<NodeId, double>> weights;
  weights.reserve(atoms.size());
  for (const auto& [z, w] : atoms)
    weights.emplace_back(t.locate(std::abs(z), std::arg(z)), w);
  return TreeMeasure(t.tree, weights);
}

}  // namespace carleson
