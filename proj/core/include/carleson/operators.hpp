#pragma once
// Positive kernel operators attached to a tree measure: the geometric kernel
// 2^{2 d(wedge) - dstar}, its upper and lower comparison kernels, the order-
// one fractional integral, and per-ring Poisson / averaging kernels. Norms
// on l^2(mu) come from a dense symmetric eigensolve below a size cap and a
// seeded, matrix-free power iteration above it, plus a quadratic-form bound
// of Schur type that upper-bounds the norm.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "carleson/bergman_tree.hpp"
#include "carleson/tree.hpp"
#include "carleson/tree_measure.hpp"

namespace carleson {

enum class OpKind {
  t_full,   // 2^{2 d(a^b) - dstar_wedge(a,b)}; needs ring geometry
  t_big,    // 2^{d(a^b)}: dominates t_full
  t_small,  // 2^{(1+r) d(a^b) - r min(d(a), d(b))}: dominated by t_full at r=1
  frac,     // 2^{-dist(a,b)}: fractional integral of order one
  poisson,  // ring C: 2^{2 d(a^b) - d(C)}
  avg       // ring C, offset k: 2^{d(C)-k} on pairs with d(a^b) = d(C)-k
};

struct OperatorHandle {
  OpKind kind = OpKind::t_big;
  double r = 1.0;          // t_small exponent parameter, r > 0
  std::int32_t ring = -1;  // poisson / avg ring id
  int k = 0;               // avg depth offset
  DStarMode mode = DStarMode::analytic;  // t_full wedge-distance mode
  int samples = 8;                       // sampled-mode rotations
  std::uint64_t seed = 1;                // sampled-mode seed
};

// Kernel entry K(a, b). `bt` is required for t_full / poisson / avg.
double kernel_value(const OperatorHandle& h, const Tree& t,
                    const BergmanTree* bt, NodeId a, NodeId b);

// Support of the point masses (mu(v) > 0), ascending ids.
std::vector<NodeId> support_nodes(const TreeMeasure& mu);

// (Tg)(a) = sum_b K(a,b) g(b) mu(b), inputs/outputs aligned with
// mu.closure().
std::vector<double> apply_tree_operator(const OperatorHandle& h,
                                        const TreeMeasure& mu,
                                        const BergmanTree* bt,
                                        const std::vector<double>& g);

// Dense kernel matrix over support_nodes(mu).
Eigen::MatrixXd kernel_matrix(const OperatorHandle& h, const TreeMeasure& mu,
                              const BergmanTree* bt);

inline constexpr int kDenseOperatorCap = 2000;

enum class NormMethod { dense_eig, power_iter, auto_select };

struct NormResult {
  double value = 0.0;
  std::string method;
  double residual = 0.0;  // ||S v - value * v|| at exit (power iteration)
  int iterations = 0;
  std::uint64_t seed = 0;
  bool converged = true;
};

// Operator norm on l^2(mu): top eigenvalue of D^{1/2} K D^{1/2} restricted
// to the support, D = diag(mu). auto_select uses the dense path up to
// kDenseOperatorCap support nodes and power iteration beyond; requesting
// dense_eig above the cap throws std::length_error.
NormResult operator_norm(const OperatorHandle& h, const TreeMeasure& mu,
                         const BergmanTree* bt,
                         NormMethod method = NormMethod::auto_select,
                         double tol = 1e-8, int max_iter = 10000,
                         std::uint64_t seed = 7);

struct VinoResult {
  double m = 0.0;  // max over (t,x) of sum_s k(s,t) k(s,x) mu(s) / sym k(t,x)
  bool infinite = false;
  int witness_t = -1;
  int witness_x = -1;
};

// Quadratic-form test: if the returned m is finite then the operator norm on
// l^2(mu) is at most m.
VinoResult schur_vino_check(const Eigen::MatrixXd& kernel,
                            const Eigen::VectorXd& mu);

struct SmallNormRow {
  double r = 0.0;
  NormResult norm;
};

struct SimpleSufficesTable {
  std::vector<SmallNormRow> rows;
  double slope = 0.0;     // log2(norm) vs log2(r) least-squares slope
  double k_factor = 0.0;  // max over rows of norm * r  (norm <= k_factor / r)
};

// Norm of the r-damped kernel across an r grid, with the O(1/r) growth fit.
SimpleSufficesTable simple_suffices_suite(
    const TreeMeasure& mu, const std::vector<double>& r_grid,
    NormMethod method = NormMethod::auto_select);

struct PoissonCheck {
  double identity_residual = 0.0;  // max | P - sum_k 2^{-k} A^k | over a ring
  double pke_min = 0.0;            // kernel-mass ratio extremes over samples
  double pke_max = 0.0;
  bool pke_in_band = false;  // all sampled ratios within [1/8, 8]
  int samples = 0;
};

// Exact geometric-sum identity for the ring Poisson kernel, plus sampled
// (node, ring) mass ratios sum_{b in B} 2^{2 d(a^b)} / 2^{d(B)+d([a]^[B])}.
PoissonCheck poisson_decomposition_check(const BergmanTree& bt,
                                         std::int32_t ring_id,
                                         int pke_samples = 64,
                                         std::uint64_t seed = 3);

}  // namespace carleson
