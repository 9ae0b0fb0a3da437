#include "carleson/two_weight.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "carleson/rng.hpp"

namespace carleson {

EmbeddingNorm two_weight_embedding_norm(const Tree& t,
                                        const std::vector<double>& w,
                                        const std::vector<double>& v) {
  const std::size_t n = t.size();
  if (n == 0) return {};
  if (n > kDenseNodeCap)
    throw std::length_error("two_weight_embedding_norm: tree exceeds dense cap");
  if (w.size() != n || v.size() != n)
    throw std::invalid_argument("two_weight_embedding_norm: weight size");

  // Columns with v=0 blow the constant up iff any ancestor-or-self weight w
  // is positive above them, i.e. iff the w-mass of the up-set of b is > 0.
  std::vector<double> istar_w = tree_sum_Istar(t, w);
  for (std::size_t b = 0; b < n; ++b) {
    if (v[b] == 0.0 && istar_w[b] > 0.0) {
      EmbeddingNorm r;
      r.infinite = true;
      r.bad_node = static_cast<NodeId>(b);
      r.norm2 = std::numeric_limits<double>::infinity();
      return r;
    }
  }

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    if (w[a] == 0.0) continue;
    const double sw = std::sqrt(w[a]);
    NodeId b = static_cast<NodeId>(a);
    while (b != kNoNode) {
      if (v[static_cast<std::size_t>(b)] > 0.0)
        M(static_cast<Eigen::Index>(a), b) =
            sw / std::sqrt(v[static_cast<std::size_t>(b)]);
      b = t.parent(b);
    }
  }
  Eigen::MatrixXd G = M.transpose() * M;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G,
                                                    Eigen::EigenvaluesOnly);
  EmbeddingNorm r;
  r.norm2 = es.eigenvalues().maxCoeff();
  return r;
}

ConditionReport two_weight_tree_condition(const Tree& t,
                                          const std::vector<double>& w,
                                          const std::vector<double>& v) {
  const std::size_t n = t.size();
  if (w.size() != n || v.size() != n)
    throw std::invalid_argument("two_weight_tree_condition: weight size");
  std::vector<double> istar_w = tree_sum_Istar(t, w);

  // S(a) = sum over the subtree of (I*w)^2 / v, accumulated bottom-up.
  std::vector<double> S(n, 0.0);
  const auto& topo = t.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const std::size_t b = static_cast<std::size_t>(*it);
    double term = 0.0;
    if (istar_w[b] > 0.0) {
      if (v[b] == 0.0)
        return ConditionReport::infinity("two_weight_tree", *it);
      term = istar_w[b] * istar_w[b] / v[b];
    }
    double acc = term;
    for (const NodeId c : t.children(*it)) acc += S[static_cast<std::size_t>(c)];
    S[b] = acc;
  }

  ConditionReport rep;
  rep.condition = "two_weight_tree";
  for (std::size_t a = 0; a < n; ++a) {
    if (istar_w[a] <= 0.0) continue;
    const double ratio = S[a] / istar_w[a];
    if (ratio > rep.constant) {
      rep.constant = ratio;
      rep.witness = static_cast<NodeId>(a);
    }
  }
  return rep;
}

namespace {

struct LeafSums {
  std::vector<double> mass;  // nu-mass of leaves below each node
  std::vector<double> fsum;  // sum of |f| nu over leaves below each node
};

LeafSums leaf_accumulate(const Tree& t, const std::vector<double>& nu,
                         const std::vector<double>* f) {
  const std::size_t n = t.size();
  LeafSums out;
  out.mass.assign(n, 0.0);
  if (f) out.fsum.assign(n, 0.0);
  const auto& topo = t.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const std::size_t v = static_cast<std::size_t>(*it);
    if (t.is_leaf(*it)) {
      out.mass[v] = nu[v];
      if (f) out.fsum[v] = std::abs((*f)[v]) * nu[v];
    } else {
      double m = 0.0, s = 0.0;
      for (const NodeId c : t.children(*it)) {
        m += out.mass[static_cast<std::size_t>(c)];
        if (f) s += out.fsum[static_cast<std::size_t>(c)];
      }
      out.mass[v] = m;
      if (f) out.fsum[v] = s;
    }
  }
  return out;
}

}  // namespace

std::vector<double> maximal_operator(const Tree& t,
                                     const std::vector<double>& nu,
                                     const std::vector<double>& f) {
  const std::size_t n = t.size();
  if (nu.size() != n || f.size() != n)
    throw std::invalid_argument("maximal_operator: vector size");
  LeafSums ls = leaf_accumulate(t, nu, &f);

  // Running max of the leaf-average along each root path.
  std::vector<double> out(n, 0.0);
  for (const NodeId v : t.topological_order()) {
    const std::size_t i = static_cast<std::size_t>(v);
    const NodeId p = t.parent(v);
    double best = (p == kNoNode) ? 0.0 : out[static_cast<std::size_t>(p)];
    if (ls.mass[i] > 0.0) best = std::max(best, ls.fsum[i] / ls.mass[i]);
    out[i] = best;
  }
  return out;
}

MaximalCheck maximal_inequality_check(const Tree& t,
                                      const std::vector<double>& sigma,
                                      const std::vector<double>& nu,
                                      int trials, std::uint64_t seed) {
  const std::size_t n = t.size();
  if (sigma.size() != n || nu.size() != n)
    throw std::invalid_argument("maximal_inequality_check: vector size");
  MaximalCheck res;
  res.seed = seed;
  res.trials = trials;

  LeafSums lnu = leaf_accumulate(t, nu, nullptr);
  LeafSums lsg = leaf_accumulate(t, sigma, nullptr);
  for (std::size_t a = 0; a < n; ++a) {
    if (lnu.mass[a] > 0.0) {
      const double r = lsg.mass[a] / lnu.mass[a];
      if (r > res.ratio_constant) {
        res.ratio_constant = r;
        res.ratio_witness = static_cast<NodeId>(a);
      }
    } else if (lsg.mass[a] > 0.0) {
      res.ratio_infinite = true;
      res.ratio_witness = static_cast<NodeId>(a);
      res.ratio_constant = std::numeric_limits<double>::infinity();
      return res;
    }
  }

  Rng rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> f(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      if (t.is_leaf(static_cast<NodeId>(v)) && nu[v] > 0.0)
        f[v] = std::abs(rng.gaussian());
    std::vector<double> mf = maximal_operator(t, nu, f);
    double num = 0.0, den = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (!t.is_leaf(static_cast<NodeId>(v))) continue;
      num += sigma[v] * mf[v] * mf[v];
      den += nu[v] * f[v] * f[v];
    }
    if (den > 0.0) res.empirical_constant =
        std::max(res.empirical_constant, num / den);
  }
  return res;
}

}  // namespace carleson
