// Kernel operators and reproducing-kernel numerics: entry formulas, pointwise
// kernel comparisons, norm computations on both solver paths, the Schur-type
// upper bound, damped-kernel growth, ring kernels, annulus norms, spectral
// interpolation tests, the boundary metric isometry, and weighted potentials.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <deque>
#include <stdexcept>
#include <utility>
#include <vector>

#include "carleson/bergman_tree.hpp"
#include "carleson/conditions.hpp"
#include "carleson/disk_trees.hpp"
#include "carleson/io.hpp"
#include "carleson/kernels.hpp"
#include "carleson/measures.hpp"
#include "carleson/operators.hpp"
#include "carleson/rng.hpp"

using namespace carleson;

namespace {

const BergmanTree& ball_tree(int n, int depth) {
  static std::deque<std::pair<std::pair<int, int>, BergmanTree>> cache;
  for (auto& [key, bt] : cache)
    if (key.first == n && key.second == depth) return bt;
  BergmanTreeOptions o;
  o.n = n;
  o.max_depth = depth;
  cache.push_back({{n, depth}, cached_bergman_tree(o)});
  return cache.back().second;
}

AtomicMeasure random_ball_measure(Rng& rng, int n, int count, double max_level,
                                  double theta) {
  AtomicMeasure mu;
  for (int i = 0; i < count; ++i) {
    CVec dir(n);
    for (int k = 0; k < n; ++k) dir(k) = rng.complex_gaussian();
    dir /= std::sqrt(abs2(dir));
    mu.push(std::tanh(rng.uniform(0.0, (max_level + 0.4) * theta)) * dir,
            0.05 + rng.uniform());
  }
  return mu;
}

CVec ball_point(Rng& rng, int n, double rmax) {
  CVec dir(n);
  for (int k = 0; k < n; ++k) dir(k) = rng.complex_gaussian();
  dir /= std::sqrt(abs2(dir));
  return rmax * std::pow(rng.uniform(), 1.0 / (2.0 * n)) * dir;
}

}  // namespace

TEST_CASE("kernel entries on hand-checkable trees") {
  Tree lin = Tree::linear(5);
  OperatorHandle frac{.kind = OpKind::frac};
  // path distance root -> deepest node is 5 edges
  CHECK(kernel_value(frac, lin, nullptr, 0, 5) == 0x1.0p-5);
  CHECK(kernel_value(frac, lin, nullptr, 3, 3) == 1.0);
  OperatorHandle big{.kind = OpKind::t_big};
  // common ancestor of depths 2 and 4 on a path is the depth-2 node
  CHECK(kernel_value(big, lin, nullptr, 2, 4) == 4.0);

  Tree fb = Tree::full_binary(3);
  // leaves 7 and 8 share the depth-2 parent 3; leaf 12 branches at the root
  CHECK(fb.parent(7) == 3);
  CHECK(fb.parent(8) == 3);
  CHECK(fb.depth(fb.wedge(7, 12)) == 0);
  OperatorHandle small1{.kind = OpKind::t_small, .r = 1.0};
  CHECK(kernel_value(small1, fb, nullptr, 7, 8) == 0x1.0p+1);   // 2^{2*2-3}
  CHECK(kernel_value(small1, fb, nullptr, 7, 12) == 0x1.0p-3);  // 2^{0-3}
  OperatorHandle small_half{.kind = OpKind::t_small, .r = 0.5};
  CHECK(kernel_value(small_half, fb, nullptr, 7, 8) ==
        doctest::Approx(std::exp2(1.5 * 2 - 0.5 * 3)).epsilon(1e-15));
  CHECK(kernel_value(frac, fb, nullptr, 7, 12) == 0x1.0p-6);
}

TEST_CASE("ring kernels take their closed-form values on ring members") {
  const BergmanTree& bt = ball_tree(2, 5);
  const std::int32_t ring = bt.rings_by_level[3][0];
  const NodeId a = bt.rings[static_cast<std::size_t>(ring)].first_node;
  OperatorHandle pois{.kind = OpKind::poisson, .ring = ring};
  // diagonal: wedge is the node itself at depth 3
  CHECK(kernel_value(pois, bt.tree, &bt, a, a) == 0x1.0p+3);  // 2^{6-3}
  OperatorHandle avg0{.kind = OpKind::avg, .ring = ring, .k = 0};
  OperatorHandle avg1{.kind = OpKind::avg, .ring = ring, .k = 1};
  CHECK(kernel_value(avg0, bt.tree, &bt, a, a) == 8.0);
  CHECK(kernel_value(avg1, bt.tree, &bt, a, a) == 0.0);
  // a distinct member of the same ring wedges strictly below depth 3
  const Ring& r = bt.ring(ring);
  REQUIRE(r.npoints >= 2);
  const NodeId b = bt.ring_member(r, 1);
  const int dw = bt.tree.depth(bt.tree.wedge(a, b));
  CHECK(dw < 3);
  CHECK(kernel_value(pois, bt.tree, &bt, a, b) == std::ldexp(1.0, 2 * dw - 3));
  CHECK(kernel_value(avg0, bt.tree, &bt, a, b) == 0.0);
  // ring kernels refuse trees without ring structure
  CHECK_THROWS_AS(kernel_value(pois, bt.tree, nullptr, a, a),
                  std::invalid_argument);
}

TEST_CASE("geometric kernel sits between its comparison kernels") {
  const BergmanTree& bt = ball_tree(2, 6);
  Rng rng(51);
  AtomicMeasure atoms = random_ball_measure(rng, 2, 60, 6.0, bt.theta);
  TreeMeasure mu = discretize(atoms, bt);
  const auto sup = support_nodes(mu);
  OperatorHandle full{.kind = OpKind::t_full};
  OperatorHandle big{.kind = OpKind::t_big};
  OperatorHandle small1{.kind = OpKind::t_small, .r = 1.0};
  const double gap_cap = std::exp2(3.5);
  for (std::size_t i = 0; i < sup.size(); ++i) {
    for (std::size_t j = i; j < sup.size(); ++j) {
      const double kf = kernel_value(full, bt.tree, &bt, sup[i], sup[j]);
      const double kb = kernel_value(big, bt.tree, &bt, sup[i], sup[j]);
      const double ks = kernel_value(small1, bt.tree, &bt, sup[i], sup[j]);
      // the wedge distance never exceeds either endpoint's depth
      CHECK(kf >= ks * (1.0 - 1e-12));
      // and stays within 3.5 of the wedge depth on this tree
      CHECK(kf <= gap_cap * kb * (1.0 + 1e-12));
      // distance nonnegativity caps the kernel by the square of the big one
      CHECK(kf <= kb * kb * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("norm of a point mass is the diagonal kernel entry") {
  Tree lin = Tree::linear(4);
  TreeMeasure mu = dirac_measure(lin, 4, 2.25);
  OperatorHandle frac{.kind = OpKind::frac};
  auto nf = operator_norm(frac, mu, nullptr);
  CHECK(nf.method == "dense_eig");
  CHECK(nf.value == doctest::Approx(2.25).epsilon(1e-12));
  OperatorHandle big{.kind = OpKind::t_big};
  CHECK(operator_norm(big, mu, nullptr).value ==
        doctest::Approx(16.0 * 2.25).epsilon(1e-12));
}

TEST_CASE("matrix, matrix-free application, and entry formula agree") {
  Tree t = Tree::full_binary(5);
  TreeMeasure mu = cantor_measure(t, 5);
  OperatorHandle big{.kind = OpKind::t_big};
  const auto K = kernel_matrix(big, mu, nullptr);
  const auto sup = support_nodes(mu);
  REQUIRE(static_cast<std::size_t>(K.rows()) == sup.size());
  for (std::size_t i = 0; i < sup.size(); i += 7)
    for (std::size_t j = 0; j < sup.size(); j += 5)
      CHECK(K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
            kernel_value(big, t, nullptr, sup[i], sup[j]));

  const auto& closure = mu.closure();
  std::vector<double> g(closure.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 1.0 + 0.1 * double(i);
  const auto y = apply_tree_operator(big, mu, nullptr, g);
  REQUIRE(y.size() == closure.size());
  for (std::size_t i = 0; i < closure.size(); i += 9) {
    double want = 0.0;
    for (std::size_t j = 0; j < closure.size(); ++j)
      want += kernel_value(big, t, nullptr, closure[i], closure[j]) * g[j] *
              mu.mass(closure[j]);
    CHECK(y[i] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("dense and iterative norm paths agree") {
  Tree t = Tree::full_binary(8);
  TreeMeasure mu = cantor_measure(t, 8);
  OperatorHandle big{.kind = OpKind::t_big};
  const auto dense = operator_norm(big, mu, nullptr, NormMethod::dense_eig);
  const auto iter = operator_norm(big, mu, nullptr, NormMethod::power_iter);
  CHECK(dense.method == "dense_eig");
  CHECK(iter.method == "lanczos");
  CHECK(iter.converged);
  CHECK(iter.value ==
        doctest::Approx(dense.value).epsilon(1e-6));
  CHECK(iter.residual <= 1e-6 * std::max(1.0, iter.value));
}

TEST_CASE("dense path refuses supports beyond its cap") {
  Tree t = Tree::full_binary(11);  // 2048 leaves
  TreeMeasure mu = cantor_measure(t, 11);
  OperatorHandle big{.kind = OpKind::t_big};
  CHECK_THROWS_AS(operator_norm(big, mu, nullptr, NormMethod::dense_eig),
                  std::length_error);
  // auto selection falls over to the iterative path instead
  const auto n = operator_norm(big, mu, nullptr);
  CHECK(n.method == "lanczos");
  CHECK(n.value == doctest::Approx(11.0 / 2.0 + 1.0).epsilon(1e-6));
}

TEST_CASE("equal-split leaf measure: dominating kernel norm is affine in depth") {
  for (int depth : {6, 8}) {
    Tree t = Tree::full_binary(depth);
    TreeMeasure mu = cantor_measure(t, depth);
    OperatorHandle big{.kind = OpKind::t_big};
    const auto n = operator_norm(big, mu, nullptr);
    CHECK(n.value == doctest::Approx(depth / 2.0 + 1.0).epsilon(1e-9));
  }
}

TEST_CASE("dominating kernel norm is unbounded along the depth family") {
  Tree t6 = Tree::full_binary(6);
  Tree t12 = Tree::full_binary(12);
  OperatorHandle big{.kind = OpKind::t_big};
  const double n6 =
      operator_norm(big, cantor_measure(t6, 6), nullptr).value;
  const double n12 =
      operator_norm(big, cantor_measure(t12, 12), nullptr).value;
  CHECK(n12 >= 1.5 * n6);
}

TEST_CASE("damped kernels have norms growing like one over the damping") {
  Tree t = Tree::full_binary(10);
  TreeMeasure mu = cantor_measure(t, 10);
  const auto table = simple_suffices_suite(mu, {1.0, 0.5, 0.25, 0.125});
  REQUIRE(table.rows.size() == 4);
  for (const auto& row : table.rows) {
    CHECK(row.norm.value > 0.0);
    CHECK(row.norm.value * row.r <= 8.0);
  }
  CHECK(table.k_factor <= 8.0);
  CHECK(table.slope <= 0.0);
  CHECK(table.slope >= -1.2);
}

TEST_CASE("Schur-type quadratic bound dominates the operator norm") {
  const BergmanTree& bt = ball_tree(2, 5);
  std::vector<double> level_mass;
  for (int l = 0; l <= 5; ++l) level_mass.push_back(1.0 / (1.0 + l));
  TreeMeasure mu = invariant_measure_by_level(bt, level_mass);
  for (OpKind kind : {OpKind::t_big, OpKind::frac, OpKind::t_small}) {
    OperatorHandle h{.kind = kind};
    const auto K = kernel_matrix(h, mu, &bt);
    const auto sup = support_nodes(mu);
    Eigen::VectorXd w(static_cast<Eigen::Index>(sup.size()));
    for (std::size_t i = 0; i < sup.size(); ++i)
      w(static_cast<Eigen::Index>(i)) = mu.mass(sup[i]);
    const auto vino = schur_vino_check(K, w);
    const auto norm = operator_norm(h, mu, &bt);
    CHECK_FALSE(vino.infinite);
    CHECK(vino.m >= norm.value - 1e-8 * std::max(1.0, norm.value));
    CHECK(vino.witness_t >= 0);
    CHECK(vino.witness_x >= 0);
  }
}

TEST_CASE("ring averaging kernels reassemble the ring kernel exactly") {
  const BergmanTree& bt = ball_tree(2, 6);
  for (int level : {3, 5}) {
    const auto chk =
        poisson_decomposition_check(bt, bt.rings_by_level[level][0]);
    CHECK(chk.identity_residual <= 1e-12);
    CHECK(chk.samples > 0);
    CHECK(chk.pke_in_band);
    CHECK(chk.pke_min >= 0.125);
    CHECK(chk.pke_max <= 8.0);
  }
}

TEST_CASE("annulus norms: quadrature, series, and closed forms coincide") {
  const auto rep = ring_domain_norms(2.0, 20);
  CHECK(rep.max_h2_error <= 1e-10);
  CHECK(rep.max_hk_error <= 1e-10);
  CHECK(rep.max_identity_residual <= 1e-10);
  CHECK(rep.corrected_constant == doctest::Approx(17.0 / 15.0).epsilon(1e-12));
  CHECK(rep.printed_constant == doctest::Approx(17.0 / 3.0).epsilon(1e-12));
  // the misprinted normalization fails the pointwise identity by a wide margin
  CHECK(rep.printed_constant_residual >= 1e-3);
  bool saw_n1 = false;
  for (const auto& row : rep.rows) {
    if (row.n == 1) {
      saw_n1 = true;
      CHECK(row.h2_formula == doctest::Approx(4.25).epsilon(1e-12));
      CHECK(row.hk_formula == doctest::Approx(60.0 / 17.0).epsilon(1e-12));
    }
  }
  CHECK(saw_n1);
  // the two norms are uniformly comparable across frequencies
  CHECK(rep.min_norm_ratio >= 1.1);
  CHECK(rep.max_norm_ratio <= 2.5);
}

TEST_CASE("embedding constant of one atom is the diagonal kernel value") {
  CVec z(2);
  z << std::complex<double>(0.4, 0.1), std::complex<double>(-0.2, 0.3);
  AtomicMeasure mu;
  mu.push(z, 2.5);
  KernelSpec bs;
  bs.family = KernelFamily::besov_sobolev;
  bs.sigma = 0.3;
  const double want = 2.5 * std::pow(1.0 - abs2(z), -0.6);
  CHECK(kernel_carleson_oracle(mu, bs) == doctest::Approx(want).epsilon(1e-12));
  KernelSpec da;
  da.family = KernelFamily::drury_arveson;
  CHECK(kernel_carleson_oracle(mu, da) ==
        doctest::Approx(2.5 / (1.0 - abs2(z))).epsilon(1e-12));
}

TEST_CASE("embedding constant never decreases when atoms are added") {
  Rng rng(57);
  AtomicMeasure mu;
  KernelSpec da;
  da.family = KernelFamily::drury_arveson;
  double prev = 0.0;
  for (int i = 0; i < 8; ++i) {
    mu.push(ball_point(rng, 2, 0.9), 0.1 + rng.uniform());
    const double cur = kernel_carleson_oracle(mu, da);
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }
}

TEST_CASE("embedding oracle refuses oversized atom lists") {
  AtomicMeasure mu;
  CVec z = CVec::Zero(2);
  for (int i = 0; i <= kOracleAtomCap; ++i) {
    z(0) = std::complex<double>(1e-4 * (i + 1), 0.0);
    mu.push(z, 1.0);
  }
  KernelSpec da;
  da.family = KernelFamily::drury_arveson;
  CHECK_THROWS_AS(kernel_carleson_oracle(mu, da), std::length_error);
}

TEST_CASE("entrywise kernel domination transfers to embedding constants") {
  Rng rng(61);
  AtomicMeasure mu;
  for (int i = 0; i < 25; ++i) mu.push(ball_point(rng, 2, 0.9), 0.2);
  KernelSpec da;
  da.family = KernelFamily::drury_arveson;
  KernelSpec bs;
  bs.family = KernelFamily::besov_sobolev;
  bs.sigma = 0.5;
  const auto same = kernel_comparison_transfer(da, bs, mu);
  CHECK(same.pointwise_factor == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(same.dominated);
  CHECK(same.oracle_a == doctest::Approx(same.oracle_b).epsilon(1e-12));
  KernelSpec doubled = bs;
  doubled.scale = 2.0;
  const auto half = kernel_comparison_transfer(da, doubled, mu);
  CHECK(half.pointwise_factor == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half.dominated);
}

TEST_CASE("interpolation matrices carry exactly one positive eigenvalue") {
  Rng rng(65);
  for (int it = 0; it < 30; ++it) {
    const int n = 1 + rng.index(3);
    const int m = 2 + rng.index(7);
    const double sigma = (it % 3 == 0) ? 0.1 : (it % 3 == 1 ? 0.25 : 0.4);
    std::vector<CVec> Z;
    for (int i = 0; i < m; ++i) Z.push_back(ball_point(rng, n, 0.97));
    const auto res = np_one_positive_eigenvalue(Z, sigma);
    CHECK(res.one_positive);
    CHECK(res.positives == 1);
    REQUIRE(static_cast<int>(res.spectrum.size()) == m);
    for (std::size_t i = 1; i < res.spectrum.size(); ++i)
      CHECK(res.spectrum[i] >= res.spectrum[i - 1]);
  }
}

TEST_CASE("interpolation diagnostics on a separated spiral") {
  std::vector<CVec> Z;
  const double golden = 2.399963229728653;
  for (int i = 0; i < 24; ++i) {
    const double r = 0.25 + 0.028 * i;
    CVec z(2);
    z << std::polar(r, golden * i), std::polar(0.3 * r, 2.0 * golden * i);
    Z.push_back(z);
  }
  const BergmanTree& bt = ball_tree(2, 6);
  const auto rep = gram_interpolation_test(Z, 0.5, &bt);
  CHECK(rep.separation > 0.0);
  CHECK_FALSE(rep.separation_infinite);
  CHECK(rep.max_offdiag < 1.0);
  CHECK(rep.gram_norm >= 1.0 - 1e-12);
  CHECK(rep.abs_gram_norm >= rep.gram_norm - 1e-12);
  CHECK(rep.has_tree);
  CHECK(rep.tree_condition_constant > 0.0);
  CHECK(rep.oracle_constant > 0.0);
  // duplicated points are rejected
  Z.push_back(Z.front());
  CHECK_THROWS_AS(gram_interpolation_test(Z, 0.5), std::invalid_argument);
}

TEST_CASE("boundary metric: vanishing diagonal, symmetry, unit range") {
  Rng rng(71);
  for (int it = 0; it < 40; ++it) {
    CVec x = ball_point(rng, 2, 0.95);
    CVec y = ball_point(rng, 2, 0.95);
    const double dxy = delta_sigma_metric(x, y, 0.35);
    CHECK(delta_sigma_metric(x, x, 0.35) <= 1e-12);
    CHECK(dxy == doctest::Approx(delta_sigma_metric(y, x, 0.35)).epsilon(1e-12));
    CHECK(dxy >= 0.0);
    CHECK(dxy <= 1.0 + 1e-12);
  }
}

TEST_CASE("coefficient embedding is a boundary-metric isometry up to the tail") {
  const auto rep = lip_isometry_check(0.25, 50, 4096, 2);
  CHECK(rep.pairs == 50);
  CHECK(rep.trunc == 4096);
  CHECK(rep.max_defect <= 1e-6);
  // normalized coefficients c_m m^{1+2 sigma} stay in a fixed band
  CHECK(rep.coeff_band_hi == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.coeff_band_lo >= 0.25);
  CHECK(rep.coeff_band_lo <= 0.35);
}

TEST_CASE("weighted potential constants at the origin match the closed form") {
  AtomicMeasure mu;
  mu.push(CVec::Zero(2), 3.0);
  const std::vector<double> alphas{0.5, 1.0, 2.0};
  const auto rep = potential_operator_check(mu, 0.5, alphas);
  REQUIRE(rep.rows.size() == alphas.size());
  const double pi = 3.14159265358979323846;
  for (const auto& row : rep.rows) {
    const double want =
        3.0 * pi * pi * std::tgamma(row.alpha + 1.0) / std::tgamma(row.alpha + 3.0);
    CHECK(row.c_alpha * row.c_alpha ==
          doctest::Approx(want).epsilon(1e-8));
    CHECK(row.scaled ==
          doctest::Approx((1.0 + row.alpha) * row.c_alpha * row.c_alpha)
              .epsilon(1e-12));
  }
  CHECK(rep.sigma == 0.5);
  CHECK(rep.radial_nodes == 48);
  CHECK(rep.sphere_points == 256);
}
