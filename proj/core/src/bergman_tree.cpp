#include "carleson/bergman_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace carleson {

namespace {

constexpr double kTheta = 0.34657359027997264;  // (ln 2)/2
constexpr double kTwoPi = 6.283185307179586476925286766559;

double level_radius(int level) {
  return std::tanh((level + 0.5) * kTheta);
}

// Largest |<u,v>| two ring directions may have while their orbits stay
// lambda-separated at radius r; negative means only one ring fits.
double ring_dot_threshold(double r, double lambda) {
  return (1.0 - (1.0 - r * r) * std::cosh(lambda)) / (r * r);
}

// Points on one circle orbit stay lambda-separated iff the angular gap s has
// cos s <= this bound.
double circle_cos_bound(double r, double lambda) {
  const double c = std::cosh(lambda);
  return (1.0 + r * r * r * r - (1.0 - r * r) * (1.0 - r * r) * c * c) /
         (2.0 * r * r);
}

int circle_points(double r, double lambda) {
  const double cs = circle_cos_bound(r, lambda);
  if (cs < -1.0) return 1;
  const double s = std::acos(std::min(1.0, std::max(-1.0, cs)));
  if (s <= 0.0) return 1;
  return std::max(1, static_cast<int>(std::floor(kTwoPi / s)));
}

}  // namespace

std::int64_t estimate_bergman_tree_nodes(int n, int max_depth) {
  // Upper estimate: per level, circle length bound times a packing bound on
  // the number of rings (4 * 2^{(n-1)N}, generous for the greedy net).
  std::int64_t total = 1;
  for (int N = 1; N <= max_depth; ++N) {
    const double r = level_radius(N);
    const double m = circle_points(r, 1.0);
    double rings = 1.0;
    if (n > 1) rings = std::min(4.0 * std::pow(2.0, (n - 1) * N), 1e15);
    const double lvl = m * rings;
    if (lvl > 4e18) return std::numeric_limits<std::int64_t>::max();
    total += static_cast<std::int64_t>(lvl);
  }
  return total;
}

BergmanTree build_bergman_tree(const BergmanTreeOptions& opts) {
  BergmanTree bt;
  bt.n = opts.n;
  bt.theta = kTheta;
  bt.lambda = 1.0;
  bt.opts = opts;
  if (opts.n < 1) throw std::invalid_argument("build_bergman_tree: n >= 1");

  Rng rng(opts.seed);

  std::vector<NodeId> parents;
  std::vector<std::int32_t> ring_parents;

  // Root kube: the shell [0, theta), center at the origin.
  parents.push_back(kNoNode);
  bt.center.push_back(CVec::Zero(opts.n));
  bt.ring_of.push_back(0);
  {
    Ring r0;
    r0.id = 0;
    r0.level = 0;
    r0.parent = -1;
    r0.dir = CVec::Zero(opts.n);
    r0.dir(0) = 1.0;
    r0.radius = 0.0;
    r0.npoints = 1;
    r0.first_node = 0;
    bt.rings.push_back(r0);
    ring_parents.push_back(-1);
    bt.rings_by_level.push_back({0});
  }

  for (int N = 1; N <= opts.max_depth; ++N) {
    const double r = level_radius(N);
    const double rprev = level_radius(N - 1);
    const int m = circle_points(r, bt.lambda);

    // --- ring directions: greedy farthest-point net over a seeded pool ---
    std::vector<CVec> dirs;
    if (opts.n == 1) {
      CVec e1(1);
      e1(0) = 1.0;
      dirs.push_back(e1);
    } else {
      const double want = opts.pool_base * std::pow(2.0, opts.n * N);
      const std::int64_t pool =
          std::max<std::int64_t>(2, std::min<std::int64_t>(
              opts.pool_cap, static_cast<std::int64_t>(
                  std::min(want, 9e18))));
      CMat cand(opts.n, pool);
      for (int i = 0; i < opts.n; ++i) cand(i, 0) = (i == 0) ? 1.0 : 0.0;
      for (std::int64_t c = 1; c < pool; ++c) {
        CVec v(opts.n);
        for (int i = 0; i < opts.n; ++i) v(i) = rng.complex_gaussian();
        const double nv = v.norm();
        cand.col(c) = (nv > 0) ? (v / nv).eval() : cand.col(0).eval();
      }
      const double tN = ring_dot_threshold(r, bt.lambda);
      Eigen::VectorXd maxdot =
          (cand.col(0).adjoint() * cand).cwiseAbs().transpose();
      std::vector<char> taken(static_cast<std::size_t>(pool), 0);
      taken[0] = 1;
      dirs.push_back(cand.col(0));
      if (tN > 0.0) {
        while (true) {
          // Farthest candidate = smallest max-dot to the selected set.
          std::int64_t best = -1;
          double bestdot = std::numeric_limits<double>::infinity();
          for (std::int64_t c = 0; c < pool; ++c) {
            if (taken[static_cast<std::size_t>(c)]) continue;
            if (maxdot(c) < bestdot) {
              bestdot = maxdot(c);
              best = c;
            }
          }
          if (best < 0 || bestdot > tN) break;
          taken[static_cast<std::size_t>(best)] = 1;
          dirs.push_back(cand.col(best));
          Eigen::VectorXd d =
              (cand.col(best).adjoint() * cand).cwiseAbs().transpose();
          maxdot = maxdot.cwiseMax(d);
        }
      }
    }

    // --- materialize rings and nodes ---
    const auto& prev_rings = bt.rings_by_level[static_cast<std::size_t>(N - 1)];
    std::vector<std::int32_t> level_ring_ids;
    for (const CVec& dir : dirs) {
      // Ring parent: previous-level ring with the closest direction.
      std::int32_t pr = prev_rings[0];
      if (opts.n > 1 && prev_rings.size() > 1) {
        double bestdot = -1.0;
        for (const std::int32_t rid : prev_rings) {
          const double d = std::abs(herm(bt.ring(rid).dir, dir));
          if (d > bestdot) {
            bestdot = d;
            pr = rid;
          }
        }
      }
      const Ring& parent_ring = bt.ring(pr);

      Ring ring;
      ring.id = static_cast<std::int32_t>(bt.rings.size());
      ring.level = N;
      ring.parent = pr;
      ring.dir = dir;
      ring.radius = r;
      ring.npoints = m;
      ring.first_node = static_cast<NodeId>(parents.size());

      const std::complex<double> align =
          (N == 1) ? std::complex<double>(1.0, 0.0)
                   : herm(parent_ring.dir, dir);
      for (int j = 0; j < m; ++j) {
        const double phi = kTwoPi * j / m;
        const std::complex<double> ph(std::cos(phi), std::sin(phi));
        bt.center.push_back((r * ph) * dir);
        bt.ring_of.push_back(ring.id);
        NodeId par = 0;
        if (N > 1) {
          // Radial projection keeps the angle; nearest member of the parent
          // ring is read off the phase of the aligned direction.
          const std::complex<double> u = rprev * ph * align;
          const double psi = (u == std::complex<double>(0.0, 0.0))
                                 ? 0.0
                                 : std::arg(u);
          const std::int64_t idx = static_cast<std::int64_t>(
              std::llround(psi * parent_ring.npoints / kTwoPi));
          par = bt.ring_member(parent_ring, idx);
        }
        parents.push_back(par);
        if (static_cast<std::int64_t>(parents.size()) > opts.max_nodes)
          throw std::length_error("build_bergman_tree: node budget exceeded");
      }
      bt.rings.push_back(ring);
      ring_parents.push_back(pr);
      level_ring_ids.push_back(ring.id);
    }
    bt.rings_by_level.push_back(level_ring_ids);
  }

  bt.tree = Tree::from_parents(parents);
  {
    std::vector<NodeId> rp(ring_parents.size());
    for (std::size_t i = 0; i < ring_parents.size(); ++i)
      rp[i] = ring_parents[i] < 0 ? kNoNode
                                  : static_cast<NodeId>(ring_parents[i]);
    bt.ring_tree = Tree::from_parents(rp);
  }
  return bt;
}

namespace {

int shell_index(const BergmanTree& bt, const CVec& z) {
  const double az2 = abs2(z);
  if (az2 >= 1.0)
    throw std::invalid_argument("locate: point outside the open ball");
  const double beta = std::atanh(std::sqrt(az2));
  const int N = static_cast<int>(std::floor(beta / bt.theta));
  if (N > bt.tree.max_depth())
    throw std::out_of_range("locate: point lies beyond the tree depth");
  return N;
}

}  // namespace

NodeId locate(const BergmanTree& bt, const CVec& z, LocateRule rule) {
  const int N = shell_index(bt, z);
  if (N == 0) return 0;
  const auto& ring_ids = bt.rings_by_level[static_cast<std::size_t>(N)];

  if (rule == LocateRule::ring_first) {
    std::int32_t best = ring_ids[0];
    double bestdot = -1.0;
    for (const std::int32_t rid : ring_ids) {
      const double d = std::abs(herm(bt.ring(rid).dir, z));
      if (d > bestdot) {
        bestdot = d;
        best = rid;
      }
    }
    const Ring& ring = bt.ring(best);
    const std::complex<double> u = herm(ring.dir, z);
    const double psi =
        (u == std::complex<double>(0.0, 0.0)) ? 0.0 : std::arg(u);
    const std::int64_t idx = static_cast<std::int64_t>(
        std::llround(psi * ring.npoints / kTwoPi));
    return bt.ring_member(ring, idx);
  }

  // flat: exact nearest center; within a level the Bergman distance is
  // monotone in |1 - herm(c, z)|, which has the closed form below.
  NodeId best_node = kNoNode;
  double best_val = std::numeric_limits<double>::infinity();
  for (const std::int32_t rid : ring_ids) {
    const Ring& ring = bt.ring(rid);
    const std::complex<double> u = herm(ring.dir, z);
    const double rho = std::abs(u);
    const double psi = (rho == 0.0) ? 0.0 : std::arg(u);
    const double rr = ring.radius;
    const double scaled = psi * ring.npoints / kTwoPi;
    const std::int64_t j0 =
        static_cast<std::int64_t>(std::floor(scaled));
    for (std::int64_t j = j0; j <= j0 + 1; ++j) {
      const double phi = kTwoPi * static_cast<double>(j) / ring.npoints;
      const double val =
          1.0 - 2.0 * rr * rho * std::cos(psi - phi) + rr * rr * rho * rho;
      const NodeId node = bt.ring_member(ring, j);
      if (val < best_val || (val == best_val && node < best_node)) {
        best_val = val;
        best_node = node;
      }
    }
  }
  return best_node;
}

NodeId locate_rotated(const BergmanTree& bt, const CVec& z, const CMat& U,
                      LocateRule rule) {
  return locate(bt, (U.adjoint() * z).eval(), rule);
}

double d_star_self(const BergmanTree& bt, NodeId v) {
  const double u = bt.center[static_cast<std::size_t>(v)].norm();
  double q = 1.0 - u * u * u * u;
  if (q < 1e-300) q = 1e-300;
  double val = -std::log2(q);
  if (val < 0.0) val = 0.0;
  const double cap = static_cast<double>(bt.depth(v));
  if (val > cap) val = cap;
  return val;
}

double d_star_wedge(const BergmanTree& bt, NodeId a, NodeId b, DStarMode mode,
                    int samples, std::uint64_t seed) {
  if (mode == DStarMode::analytic) {
    const double cap = std::min(d_star_self(bt, a), d_star_self(bt, b));
    if (bt.ring_of[static_cast<std::size_t>(a)] ==
        bt.ring_of[static_cast<std::size_t>(b)])
      return cap;
    const double u =
        std::abs(herm(bt.center[static_cast<std::size_t>(a)],
                      bt.center[static_cast<std::size_t>(b)]));
    double q = 1.0 - u * u;
    if (q < 1e-300) q = 1e-300;
    double val = -std::log2(q);
    if (val < 0.0) val = 0.0;
    if (val > cap) val = cap;
    return val;
  }
  if (bt.ring_of[static_cast<std::size_t>(a)] ==
      bt.ring_of[static_cast<std::size_t>(b)])
    return static_cast<double>(std::min(bt.depth(a), bt.depth(b)));
  // The quotient distance is the infimum of the relocated pair distance over
  // rotations, i.e. the deepest ring-tree wedge any rotation realizes. Sample
  // 0 is the identity, so the untranslated combinatorial wedge is always in
  // the running; random rotations can only reveal closeness that the fixed
  // net's orbit rounding hides, never invent depth, because rotations
  // preserve the circle-orbit separation exactly.
  Rng rng(seed);
  int best = 0;
  for (int s = 0; s < samples; ++s) {
    NodeId ra = a, rb = b;
    if (s > 0) {
      const CMat U = haar_unitary(bt.n, rng);
      ra = locate(bt, (U * bt.center[static_cast<std::size_t>(a)]).eval());
      rb = locate(bt, (U * bt.center[static_cast<std::size_t>(b)]).eval());
    }
    const NodeId rw = bt.ring_tree.wedge(bt.ring_of[static_cast<std::size_t>(ra)],
                                         bt.ring_of[static_cast<std::size_t>(rb)]);
    best = std::max(best, bt.ring_tree.depth(rw));
  }
  return static_cast<double>(best);
}

double d_star_pair(const BergmanTree& bt, NodeId a, NodeId b, DStarMode mode,
                   int samples, std::uint64_t seed) {
  const double wedge = d_star_wedge(bt, a, b, mode, samples, seed);
  if (mode == DStarMode::analytic) {
    return d_star_self(bt, a) + d_star_self(bt, b) - 2.0 * wedge;
  }
  return bt.depth(a) + bt.depth(b) - 2.0 * wedge;
}

std::vector<std::pair<NodeId, NodeId>> grandk_pairs(
    const BergmanTree& bt, NodeId gamma, int k, double tau,
    PairPredicate pred, const TreeMeasure* restrict_to) {
  if (k < 0) throw std::invalid_argument("grandk_pairs: k >= 0");
  const int dg = bt.depth(gamma);
  const int q = dg + k + 2;
  if (q > bt.tree.max_depth())
    throw std::out_of_range("grandk_pairs: tree shallower than d(gamma)+k+2");

  std::vector<NodeId> nodes;
  if (restrict_to) {
    for (const NodeId v : restrict_to->closure())
      if (bt.depth(v) == q && bt.tree.ancestor_at(v, dg) == gamma)
        nodes.push_back(v);
  } else {
    std::vector<NodeId> frontier{gamma};
    for (int d = dg; d < q; ++d) {
      std::vector<NodeId> next;
      for (const NodeId v : frontier)
        for (const NodeId c : bt.tree.children(v)) next.push_back(c);
      frontier.swap(next);
    }
    nodes = std::move(frontier);
    std::sort(nodes.begin(), nodes.end());
  }

  std::vector<NodeId> branch(nodes.size());
  std::vector<std::int32_t> a2ring(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    branch[i] = bt.tree.ancestor_at(nodes[i], dg + 1);
    a2ring[i] =
        bt.ring_of[static_cast<std::size_t>(bt.tree.ancestor_at(nodes[i], q - 2))];
  }

  std::vector<std::pair<NodeId, NodeId>> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (branch[i] == branch[j]) continue;
      if (a2ring[i] != a2ring[j]) continue;
      const double dsp = d_star_pair(bt, nodes[i], nodes[j]);
      const bool pass = (pred == PairPredicate::exact_band)
                            ? std::abs(dsp - 4.0) <= tau
                            : dsp >= 2.0;
      if (pass) out.emplace_back(nodes[i], nodes[j]);
    }
  }
  return out;
}

}  // namespace carleson
