#include "carleson/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "carleson/rng.hpp"

namespace carleson {

namespace {

const BergmanTree& require_rings(const BergmanTree* bt, const char* what) {
  if (bt == nullptr || bt->rings.empty())
    throw std::invalid_argument(std::string(what) +
                                ": requires a ring-structured tree");
  return *bt;
}

int ring_level(const BergmanTree& bt, std::int32_t ring_id) {
  if (ring_id < 0 || ring_id >= static_cast<std::int32_t>(bt.rings.size()))
    throw std::invalid_argument("ring id out of range");
  return bt.rings[static_cast<std::size_t>(ring_id)].level;
}

}  // namespace

double kernel_value(const OperatorHandle& h, const Tree& t,
                    const BergmanTree* bt, NodeId a, NodeId b) {
  const int dw = t.depth(t.wedge(a, b));
  switch (h.kind) {
    case OpKind::t_full: {
      const BergmanTree& g = require_rings(bt, "t_full");
      double ds = d_star_wedge(g, a, b, h.mode, h.samples, h.seed);
      return std::exp2(2.0 * dw - ds);
    }
    case OpKind::t_big:
      return std::ldexp(1.0, dw);
    case OpKind::t_small:
      return std::exp2((1.0 + h.r) * dw -
                       h.r * std::min(t.depth(a), t.depth(b)));
    case OpKind::frac:
      return std::ldexp(1.0, -(t.depth(a) + t.depth(b) - 2 * dw));
    case OpKind::poisson: {
      const BergmanTree& g = require_rings(bt, "poisson");
      return std::ldexp(1.0, 2 * dw - ring_level(g, h.ring));
    }
    case OpKind::avg: {
      const BergmanTree& g = require_rings(bt, "avg");
      int level = ring_level(g, h.ring);
      return dw == level - h.k ? std::ldexp(1.0, level - h.k) : 0.0;
    }
  }
  return 0.0;
}

std::vector<NodeId> support_nodes(const TreeMeasure& mu) {
  std::vector<NodeId> sup;
  for (NodeId v : mu.closure())
    if (mu.mass(v) > 0.0) sup.push_back(v);
  return sup;
}

std::vector<double> apply_tree_operator(const OperatorHandle& h,
                                        const TreeMeasure& mu,
                                        const BergmanTree* bt,
                                        const std::vector<double>& g) {
  const auto& closure = mu.closure();
  if (g.size() != closure.size())
    throw std::invalid_argument("apply_tree_operator: size mismatch");
  const Tree& t = mu.tree();
  std::vector<double> out(closure.size(), 0.0);
  for (std::size_t i = 0; i < closure.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < closure.size(); ++j) {
      double w = mu.mass(closure[j]);
      if (w == 0.0 || g[j] == 0.0) continue;
      acc += kernel_value(h, t, bt, closure[i], closure[j]) * g[j] * w;
    }
    out[i] = acc;
  }
  return out;
}

Eigen::MatrixXd kernel_matrix(const OperatorHandle& h, const TreeMeasure& mu,
                              const BergmanTree* bt) {
  auto sup = support_nodes(mu);
  const Tree& t = mu.tree();
  Eigen::MatrixXd K(sup.size(), sup.size());
  for (std::size_t i = 0; i < sup.size(); ++i)
    for (std::size_t j = i; j < sup.size(); ++j) {
      double v = kernel_value(h, t, bt, sup[i], sup[j]);
      K(i, j) = v;
      K(j, i) = v;
    }
  return K;
}

namespace {

// Symmetrized weighted kernel applied matrix-free. Kernels that depend on
// the pair only through (wedge depth, own depths) stratify over the ancestor
// chain: with B(u, l) the subtree sum of sqrt(mu) x over depth-l nodes below
// u, the wedge-at-depth-j stratum of a is B(anc_j, .) - B(anc_{j+1}, .).
class StratifiedApply {
 public:
  StratifiedApply(const OperatorHandle& h, const TreeMeasure& mu) : h_(h) {
    const auto& closure = mu.closure();
    index_.reserve(closure.size() * 2);
    for (std::size_t i = 0; i < closure.size(); ++i)
      index_.emplace(closure[i], static_cast<int>(i));
    const Tree& t = mu.tree();
    depth_.resize(closure.size());
    parent_.assign(closure.size(), -1);
    maxd_ = 0;
    for (std::size_t i = 0; i < closure.size(); ++i) {
      depth_[i] = t.depth(closure[i]);
      maxd_ = std::max(maxd_, depth_[i]);
      NodeId p = t.parent(closure[i]);
      if (p != kNoNode) parent_[i] = index_.at(p);
    }
    for (NodeId v : closure)
      if (mu.mass(v) > 0.0) {
        support_.push_back(index_.at(v));
        root_mass_.push_back(std::sqrt(mu.mass(v)));
      }
    // Ancestor chains of support nodes, closure indices by depth 0..d.
    chains_.resize(support_.size());
    for (std::size_t s = 0; s < support_.size(); ++s) {
      int i = support_[s];
      std::vector<int> chain(depth_[i] + 1);
      for (int c = i; c >= 0; c = parent_[c]) chain[depth_[c]] = c;
      chains_[s] = std::move(chain);
    }
    // Reverse topological order of closure indices (children first).
    const auto& topo = mu.closure_topological();
    rev_topo_.reserve(topo.size());
    for (auto it = topo.rbegin(); it != topo.rend(); ++it)
      rev_topo_.push_back(index_.at(*it));
    strata_.assign(closure.size(), std::vector<double>(maxd_ + 1, 0.0));
    // phi(j, da, l) factors into per-index tables; precomputing them keeps
    // the inner loop free of transcendentals.
    p1_.resize(maxd_ + 1);
    p2_.resize(maxd_ + 1);
    p3_.resize(2 * maxd_ + 1);
    for (int j = 0; j <= maxd_; ++j) {
      switch (h_.kind) {
        case OpKind::t_big:
          p1_[j] = std::ldexp(1.0, j);
          p2_[j] = 1.0;
          break;
        case OpKind::t_small:
          p1_[j] = std::exp2((1.0 + h_.r) * j);
          p2_[j] = std::exp2(-h_.r * j);
          break;
        default:  // frac
          p1_[j] = std::ldexp(1.0, 2 * j);
          p2_[j] = 1.0;
          break;
      }
    }
    for (int m = 0; m <= 2 * maxd_; ++m)
      p3_[m] = h_.kind == OpKind::frac ? std::ldexp(1.0, -m) : 1.0;
  }

  std::size_t size() const { return support_.size(); }

  // y = D^{1/2} K D^{1/2} x over support coordinates.
  void apply(const std::vector<double>& x, std::vector<double>& y) {
    for (auto& row : strata_) std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t s = 0; s < support_.size(); ++s)
      strata_[support_[s]][depth_[support_[s]]] = root_mass_[s] * x[s];
    for (int i : rev_topo_) {
      if (parent_[i] < 0) continue;
      auto& dst = strata_[parent_[i]];
      const auto& src = strata_[i];
      for (int l = depth_[i]; l <= maxd_; ++l) dst[l] += src[l];
    }
    for (std::size_t s = 0; s < support_.size(); ++s) {
      const auto& chain = chains_[s];
      const int da = static_cast<int>(chain.size()) - 1;
      double acc = 0.0;
      for (int j = 0; j <= da; ++j) {
        const auto& here = strata_[chain[j]];
        const auto* below = j < da ? &strata_[chain[j + 1]] : nullptr;
        for (int l = j; l <= maxd_; ++l) {
          double part = here[l] - (below != nullptr ? (*below)[l] : 0.0);
          if (part == 0.0) continue;
          acc += phi(j, da, l) * part;
        }
      }
      y[s] = root_mass_[s] * acc;
    }
  }

 private:
  double phi(int j, int da, int l) const {
    return p1_[j] * p2_[std::min(da, l)] * p3_[da + l];
  }

  OperatorHandle h_;
  std::unordered_map<NodeId, int> index_;
  std::vector<int> depth_, parent_, support_, rev_topo_;
  std::vector<double> root_mass_;
  std::vector<std::vector<int>> chains_;
  std::vector<std::vector<double>> strata_;
  std::vector<double> p1_, p2_, p3_;  // phi factor tables
  int maxd_ = 0;
};

bool stratifiable(OpKind kind) {
  return kind == OpKind::t_big || kind == OpKind::t_small ||
         kind == OpKind::frac;
}

NormResult dense_norm(const OperatorHandle& h, const TreeMeasure& mu,
                      const BergmanTree* bt) {
  auto sup = support_nodes(mu);
  NormResult res;
  res.method = "dense_eig";
  if (sup.empty()) return res;
  if (sup.size() > kDenseOperatorCap)
    throw std::length_error("operator_norm: support exceeds the dense cap");
  Eigen::MatrixXd S = kernel_matrix(h, mu, bt);
  Eigen::VectorXd root(sup.size());
  for (std::size_t i = 0; i < sup.size(); ++i)
    root[i] = std::sqrt(mu.mass(sup[i]));
  S = root.asDiagonal() * S * root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  res.value = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  return res;
}

NormResult power_norm(const OperatorHandle& h, const TreeMeasure& mu,
                      const BergmanTree* bt, double tol, int max_iter,
                      std::uint64_t seed) {
  NormResult res;
  res.method = "lanczos";
  res.seed = seed;
  auto sup = support_nodes(mu);
  if (sup.empty()) return res;

  const Tree& t = mu.tree();
  std::vector<double> root(sup.size());
  for (std::size_t i = 0; i < sup.size(); ++i)
    root[i] = std::sqrt(mu.mass(sup[i]));

  std::optional<StratifiedApply> fast;
  if (stratifiable(h.kind)) fast.emplace(h, mu);

  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    if (fast) {
      fast->apply(x, y);
      return;
    }
    for (std::size_t i = 0; i < sup.size(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < sup.size(); ++j)
        acc += kernel_value(h, t, bt, sup[i], sup[j]) * root[j] * x[j];
      y[i] = root[i] * acc;
    }
  };

  // Lanczos with full reorthogonalization. The symmetrized kernels here have
  // tightly clustered top eigenvalues, where plain power iteration crawls;
  // the Ritz value locks on within a couple hundred steps regardless.
  const std::size_t n = sup.size();
  const int cap =
      std::max(2, std::min({max_iter, static_cast<int>(n), 220}));
  std::vector<std::vector<double>> Q;
  Q.reserve(static_cast<std::size_t>(cap) + 1);
  {
    Rng rng(seed);
    std::vector<double> q(n);
    double nrm = 0.0;
    for (auto& v : q) {
      v = rng.gaussian();
      nrm += v * v;
    }
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) {
      q[0] = 1.0;
      nrm = 1.0;
    }
    for (auto& v : q) v /= nrm;
    Q.push_back(std::move(q));
  }

  std::vector<double> alpha, beta;
  std::vector<double> w(n);
  double theta = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  res.converged = false;
  int k = 0;
  for (; k < cap; ++k) {
    apply(Q[static_cast<std::size_t>(k)], w);
    if (k > 0) {
      const auto& qm = Q[static_cast<std::size_t>(k) - 1];
      const double b = beta[static_cast<std::size_t>(k) - 1];
      for (std::size_t i = 0; i < n; ++i) w[i] -= b * qm[i];
    }
    const auto& qk = Q[static_cast<std::size_t>(k)];
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i) a += qk[i] * w[i];
    alpha.push_back(a);
    for (std::size_t i = 0; i < n; ++i) w[i] -= a * qk[i];
    for (const auto& qj : Q) {
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) c += qj[i] * w[i];
      if (c != 0.0)
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * qj[i];
    }
    double b = 0.0;
    for (double v : w) b += v * v;
    b = std::sqrt(b);

    const bool breakdown = b <= 1e-13 * std::max(1.0, std::abs(a));
    if ((k + 1) % 5 == 0 || breakdown || k + 1 == cap) {
      const int m = k + 1;
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < m)
          T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T);
      const int top = m - 1;
      theta = eig.eigenvalues()(top);
      const double slast = std::abs(eig.eigenvectors()(m - 1, top));
      residual = b * slast;
      if (residual <= tol * std::max(std::abs(theta), 1e-300) || breakdown) {
        res.converged = true;
        ++k;
        break;
      }
    }
    beta.push_back(b);
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b;
    Q.push_back(std::move(q));
  }
  res.value = std::max(theta, 0.0);
  res.iterations = k;
  res.residual = residual;
  return res;
}

}  // namespace

NormResult operator_norm(const OperatorHandle& h, const TreeMeasure& mu,
                         const BergmanTree* bt, NormMethod method, double tol,
                         int max_iter, std::uint64_t seed) {
  if (method == NormMethod::auto_select)
    method = support_nodes(mu).size() <= kDenseOperatorCap
                 ? NormMethod::dense_eig
                 : NormMethod::power_iter;
  return method == NormMethod::dense_eig
             ? dense_norm(h, mu, bt)
             : power_norm(h, mu, bt, tol, max_iter, seed);
}

VinoResult schur_vino_check(const Eigen::MatrixXd& kernel,
                            const Eigen::VectorXd& mu) {
  if (kernel.rows() != kernel.cols() || kernel.rows() != mu.size())
    throw std::invalid_argument("schur_vino_check: shape mismatch");
  VinoResult res;
  const Eigen::Index n = kernel.rows();
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index x = 0; x < n; ++x) {
      double num = 0.0;
      for (Eigen::Index s = 0; s < n; ++s)
        num += kernel(s, t) * kernel(s, x) * mu[s];
      double den = 0.5 * (kernel(t, x) + kernel(x, t));
      if (den == 0.0) {
        if (num > 0.0) {
          res.infinite = true;
          res.m = std::numeric_limits<double>::infinity();
          res.witness_t = static_cast<int>(t);
          res.witness_x = static_cast<int>(x);
          return res;
        }
        continue;
      }
      double ratio = num / den;
      if (ratio > res.m) {
        res.m = ratio;
        res.witness_t = static_cast<int>(t);
        res.witness_x = static_cast<int>(x);
      }
    }
  }
  return res;
}

SimpleSufficesTable simple_suffices_suite(const TreeMeasure& mu,
                                          const std::vector<double>& r_grid,
                                          NormMethod method) {
  SimpleSufficesTable table;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int fitted = 0;
  for (double r : r_grid) {
    OperatorHandle h;
    h.kind = OpKind::t_small;
    h.r = r;
    SmallNormRow row;
    row.r = r;
    row.norm = operator_norm(h, mu, nullptr, method);
    table.k_factor = std::max(table.k_factor, row.norm.value * r);
    if (row.norm.value > 0.0 && r > 0.0) {
      double x = std::log2(r), y = std::log2(row.norm.value);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++fitted;
    }
    table.rows.push_back(std::move(row));
  }
  if (fitted >= 2) {
    double denom = fitted * sxx - sx * sx;
    if (denom != 0.0) table.slope = (fitted * sxy - sx * sy) / denom;
  }
  return table;
}

PoissonCheck poisson_decomposition_check(const BergmanTree& bt,
                                         std::int32_t ring_id, int pke_samples,
                                         std::uint64_t seed) {
  if (ring_id < 0 || ring_id >= static_cast<std::int32_t>(bt.rings.size()))
    throw std::invalid_argument("poisson_decomposition_check: ring id");
  const Ring& ring = bt.rings[static_cast<std::size_t>(ring_id)];
  const Tree& t = bt.tree;
  const int level = ring.level;

  PoissonCheck out;
  // Exact geometric-sum identity on the ring's member pairs.
  for (int i = 0; i < ring.npoints; ++i) {
    for (int j = 0; j < ring.npoints; ++j) {
      NodeId a = ring.first_node + i;
      NodeId b = ring.first_node + j;
      int dw = t.depth(t.wedge(a, b));
      double poisson = std::ldexp(1.0, 2 * dw - level);
      double sum = 0.0;
      for (int k = 0; k <= level; ++k)
        if (dw == level - k) sum += std::ldexp(1.0, -k) * std::ldexp(1.0, level - k);
      out.identity_residual =
          std::max(out.identity_residual, std::abs(poisson - sum));
    }
  }

  // Sampled kernel-mass ratios against 2^{d(B) + d([a] ^ [B])}.
  Rng rng(seed);
  out.samples = pke_samples;
  out.pke_min = std::numeric_limits<double>::infinity();
  out.pke_max = 0.0;
  for (int s = 0; s < pke_samples; ++s) {
    NodeId a = static_cast<NodeId>(rng.index(t.size()));
    const Ring& B =
        bt.rings[rng.index(bt.rings.size())];
    double num = 0.0;
    for (int j = 0; j < B.npoints; ++j)
      num += std::ldexp(1.0, 2 * t.depth(t.wedge(a, B.first_node + j)));
    int ring_wedge =
        bt.ring_tree.depth(bt.ring_tree.wedge(bt.ring_of[a], B.id));
    double den = std::ldexp(1.0, B.level + ring_wedge);
    double ratio = num / den;
    out.pke_min = std::min(out.pke_min, ratio);
    out.pke_max = std::max(out.pke_max, ratio);
  }
  if (pke_samples == 0) {
    out.pke_min = 1.0;
    out.pke_max = 1.0;
  }
  out.pke_in_band = out.pke_min >= 0.125 && out.pke_max <= 8.0;
  return out;
}

}  // namespace carleson
