#include "carleson/conditions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "carleson/rng.hpp"

namespace carleson {

namespace {

// Deterministic argmax over the closure: ascending ids, strict improvement,
// so the smallest node wins ties.
template <typename Fn>
ConditionReport sup_over_closure(const TreeMeasure& mu, const char* name,
                                 Fn&& value) {
  ConditionReport rep;
  rep.condition = name;
  rep.constant = 0.0;
  rep.witness = kNoNode;
  for (NodeId v : mu.closure()) {
    double val = value(v);
    if (val > rep.constant) {
      rep.constant = val;
      rep.witness = v;
    }
  }
  return rep;
}

// Subtree sums of a per-node value over the support closure.
std::unordered_map<NodeId, double> closure_suffix(
    const TreeMeasure& mu, const std::function<double(NodeId)>& g) {
  const auto& topo = mu.closure_topological();
  std::unordered_map<NodeId, double> suffix;
  suffix.reserve(topo.size() * 2);
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    double s = g(*it);
    for (NodeId c : mu.closure_children(*it)) s += suffix.at(c);
    suffix.emplace(*it, s);
  }
  return suffix;
}

}  // namespace

ConditionReport simple_condition(const TreeMeasure& mu, double sigma) {
  auto rep = sup_over_closure(mu, "simple", [&](NodeId v) {
    return std::exp2(2.0 * sigma * mu.tree().depth(v)) * mu.istar(v);
  });
  rep.params = {{"sigma", sigma}};
  return rep;
}

ConditionReport tree_condition(const TreeMeasure& mu, double sigma) {
  auto suffix = closure_suffix(mu, [&](NodeId v) {
    double t = std::exp2(sigma * mu.tree().depth(v)) * mu.istar(v);
    return t * t;
  });
  auto rep = sup_over_closure(mu, "tree", [&](NodeId v) {
    double d = mu.istar(v);
    return d > 0.0 ? suffix.at(v) / d : 0.0;
  });
  rep.params = {{"sigma", sigma}};
  return rep;
}

ConditionReport strengthened_simple(const TreeMeasure& mu, double sigma,
                                    const std::function<double(int)>& h,
                                    const std::string& h_name) {
  auto rep = sup_over_closure(mu, "ssimp", [&](NodeId v) {
    int d = mu.tree().depth(v);
    double hv = h(d);
    if (!(hv > 0.0))
      throw std::invalid_argument("strengthened_simple: gauge must be > 0");
    return std::exp2(2.0 * sigma * d) * mu.istar(v) / hv;
  });
  rep.params = {{"sigma", sigma}, {"gauge", h_name}};
  return rep;
}

ConditionReport lp_simple(const TreeMeasure& mu, double sigma, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("lp_simple: p > 0 required");
  auto suffix = closure_suffix(
      mu, [&](NodeId v) { return std::pow(mu.mass(v), p); });
  auto rep = sup_over_closure(mu, "lp", [&](NodeId v) {
    return std::exp2(2.0 * sigma * mu.tree().depth(v)) *
           std::pow(suffix.at(v), 1.0 / p);
  });
  rep.params = {{"sigma", sigma}, {"p", p}};
  return rep;
}

namespace {
ImplicationCheck make_implication(const std::string& route, double tree_c,
                                  double route_c, double bound) {
  ImplicationCheck chk;
  chk.route = route;
  chk.tree_constant = tree_c;
  chk.route_constant = route_c;
  if (route_c > 0.0)
    chk.ratio = tree_c / route_c;
  else
    chk.ratio = tree_c > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  chk.bound = bound;
  chk.ok = tree_c <= bound * route_c || tree_c == 0.0;
  return chk;
}
}  // namespace

ImplicationCheck simple_implies_tree_check(const TreeMeasure& mu, double sigma,
                                           const std::function<double(int)>& h,
                                           double bound,
                                           const std::string& h_name) {
  double tree_c = tree_condition(mu, sigma).constant;
  double route_c = strengthened_simple(mu, sigma, h, h_name).constant;
  return make_implication("ssimp", tree_c, route_c, bound);
}

ImplicationCheck simple_implies_tree_check(const TreeMeasure& mu, double sigma,
                                           double p, double bound) {
  double tree_c = tree_condition(mu, sigma).constant;
  double route_c = lp_simple(mu, sigma, p).constant;
  return make_implication("lp", tree_c, route_c, bound);
}

namespace {

enum class KPolicy { all, within_eps, beyond_eps };

ConditionReport split_engine(const TreeMeasure& mu, const BergmanTree& bt,
                             const SplitOptions& opt, KPolicy policy,
                             double eps, const char* name,
                             int* max_gamma_depth_out = nullptr) {
  if (bt.rings.empty())
    throw std::invalid_argument("split condition: tree has no ring structure");
  if (mu.tree().size() != bt.tree.size())
    throw std::invalid_argument("split condition: measure on a different tree");

  const Tree& t = bt.tree;
  const auto& closure = mu.closure();
  int maxd = 0;
  for (NodeId v : closure) maxd = std::max(maxd, t.depth(v));
  std::vector<std::vector<NodeId>> by_depth(maxd + 1);
  for (NodeId v : closure)
    if (mu.istar(v) > 0.0) by_depth[t.depth(v)].push_back(v);

  // Every splitting pair (d, d') of equal-depth closure nodes contributes
  // 2^{d(g)-k} I*mu(d) I*mu(d') to its wedge g, once per order.
  std::unordered_map<NodeId, double> weight;
  weight.reserve(closure.size());
  for (int q = 2; q <= maxd; ++q) {
    const auto& grp = by_depth[q];
    for (std::size_t i = 0; i < grp.size(); ++i) {
      for (std::size_t j = i + 1; j < grp.size(); ++j) {
        NodeId g = t.wedge(grp[i], grp[j]);
        int dg = t.depth(g);
        int k = q - dg - 2;
        if (k < 0 || k > opt.k_max) continue;
        if (policy == KPolicy::within_eps && k > eps * dg) continue;
        if (policy == KPolicy::beyond_eps && k <= eps * dg) continue;
        if (bt.ring_of[t.ancestor_at(grp[i], q - 2)] !=
            bt.ring_of[t.ancestor_at(grp[j], q - 2)])
          continue;
        double dsp =
            d_star_pair(bt, grp[i], grp[j], opt.mode, opt.samples, opt.seed);
        bool pass = opt.pred == PairPredicate::exact_band
                        ? std::abs(dsp - 4.0) <= opt.tau
                        : dsp >= 2.0;
        if (!pass) continue;
        weight[g] +=
            std::ldexp(2.0 * mu.istar(grp[i]) * mu.istar(grp[j]), dg - k);
      }
    }
  }

  if (max_gamma_depth_out) {
    int deepest = -1;
    for (const auto& [g, w] : weight)
      if (w > 0.0) deepest = std::max(deepest, t.depth(g));
    *max_gamma_depth_out = deepest;
  }

  auto suffix = closure_suffix(mu, [&](NodeId v) {
    auto it = weight.find(v);
    return it == weight.end() ? 0.0 : it->second;
  });
  auto rep = sup_over_closure(mu, name, [&](NodeId v) {
    double d = mu.istar(v);
    return d > 0.0 ? suffix.at(v) / d : 0.0;
  });
  rep.params = {
      {"k_max", opt.k_max},
      {"tau", opt.tau},
      {"predicate",
       opt.pred == PairPredicate::exact_band ? "exact_band" : "at_least"},
      {"distance_mode",
       opt.mode == DStarMode::analytic ? "analytic" : "sampled"}};
  if (opt.mode == DStarMode::sampled) {
    rep.params["samples"] = opt.samples;
    rep.params["seed"] = opt.seed;
  }
  if (policy != KPolicy::all) rep.params["eps"] = eps;
  return rep;
}

}  // namespace

ConditionReport split_tree_condition(const TreeMeasure& mu,
                                     const BergmanTree& bt,
                                     const SplitOptions& opt) {
  return split_engine(mu, bt, opt, KPolicy::all, 0.0, "split");
}

ConditionReport epsilon_split_condition(const TreeMeasure& mu,
                                        const BergmanTree& bt, double eps,
                                        const SplitOptions& opt) {
  if (eps < 0.0) throw std::invalid_argument("epsilon_split: eps >= 0");
  return split_engine(mu, bt, opt, KPolicy::within_eps, eps, "eps_split");
}

ConditionReport split_tail_condition(const TreeMeasure& mu,
                                     const BergmanTree& bt, double eps,
                                     const SplitOptions& opt) {
  if (eps < 0.0) throw std::invalid_argument("split_tail: eps >= 0");
  return split_engine(mu, bt, opt, KPolicy::beyond_eps, eps, "split_tail");
}

int epsilon_split_witness_depth(const TreeMeasure& mu, const BergmanTree& bt,
                                double eps, const SplitOptions& opt) {
  if (eps < 0.0) throw std::invalid_argument("epsilon_split: eps >= 0");
  int deepest = -1;
  split_engine(mu, bt, opt, KPolicy::within_eps, eps, "eps_split", &deepest);
  return deepest;
}

RotatedConditionResult rotated_max(
    const AtomicMeasure& atoms, const BergmanTree& bt, int rotations,
    std::uint64_t seed,
    const std::function<ConditionReport(const TreeMeasure&)>& evaluate) {
  if (rotations < 1) throw std::invalid_argument("rotated_max: rotations >= 1");
  Rng rng(seed);
  RotatedConditionResult out;
  out.rotations = rotations;
  out.seed = seed;
  bool first = true;
  for (int j = 0; j < rotations; ++j) {
    CMat U = j == 0 ? CMat(CMat::Identity(bt.n, bt.n)) : haar_unitary(bt.n, rng);
    ConditionReport rep = evaluate(discretize(rotate(atoms, U), bt));
    if (first || rep.constant > out.report.constant) {
      out.report = std::move(rep);
      out.rotation_index = j;
      first = false;
    }
  }
  out.report.params["rotations"] = rotations;
  out.report.params["rotation_index"] = out.rotation_index;
  out.report.params["rotation_seed"] = seed;
  return out;
}

RotatedConditionResult split_over_rotations(const AtomicMeasure& atoms,
                                            const BergmanTree& bt,
                                            int rotations, std::uint64_t seed,
                                            const SplitOptions& opt) {
  return rotated_max(atoms, bt, rotations, seed, [&](const TreeMeasure& m) {
    return split_tree_condition(m, bt, opt);
  });
}

CarlesonEstimate drury_arveson_estimate(const TreeMeasure& mu,
                                        const BergmanTree& bt,
                                        const SplitOptions& opt) {
  CarlesonEstimate est;
  est.simple = simple_condition(mu, 0.5);
  est.split = split_tree_condition(mu, bt, opt);
  est.simple_part = std::sqrt(est.simple.constant);
  est.split_part = std::sqrt(est.split.constant);
  est.combined = est.simple_part + est.split_part;
  return est;
}

CarlesonEstimate drury_arveson_estimate_rotated(const AtomicMeasure& atoms,
                                                const BergmanTree& bt,
                                                int rotations,
                                                std::uint64_t seed,
                                                const SplitOptions& opt) {
  CarlesonEstimate est;
  est.simple = rotated_max(atoms, bt, rotations, seed,
                           [&](const TreeMeasure& m) {
                             return simple_condition(m, 0.5);
                           })
                   .report;
  est.split = split_over_rotations(atoms, bt, rotations, seed, opt).report;
  est.simple_part = std::sqrt(est.simple.constant);
  est.split_part = std::sqrt(est.split.constant);
  est.combined = est.simple_part + est.split_part;
  return est;
}

FattenedComparison fattened_conditions(const TreeMeasure& mu_standard,
                                       const TreeMeasure& mu_fattened,
                                       double sigma) {
  FattenedComparison cmp;
  cmp.t_standard = tree_condition(mu_standard, sigma);
  cmp.t_standard.condition = "tree_standard";
  cmp.t_fattened = tree_condition(mu_fattened, sigma);
  cmp.t_fattened.condition = "tree_fattened";
  cmp.s_fattened = simple_condition(mu_fattened, sigma);
  cmp.s_fattened.condition = "simple_fattened";
  if (cmp.t_fattened.constant > 0.0)
    cmp.implication_ratio = cmp.t_standard.constant / cmp.t_fattened.constant;
  else
    cmp.implication_ratio =
        cmp.t_standard.constant > 0.0
            ? std::numeric_limits<double>::infinity()
            : 0.0;
  return cmp;
}

}  // namespace carleson
