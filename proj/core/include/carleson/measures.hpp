#pragma once
// Measure constructions: atomic measures on the ball and their projection
// onto Bergman-tree kubes, self-similar leaf measures, coefficient embeddings
// of the disk with Lipschitz boundary behavior, quadrature measures along
// parametrized surfaces with boundary-contact classification, circle-orbit
// invariant measures, and derivative-density measures for polynomial symbols.

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "carleson/ball.hpp"
#include "carleson/bergman_tree.hpp"
#include "carleson/disk_trees.hpp"
#include "carleson/tree.hpp"
#include "carleson/tree_measure.hpp"

namespace carleson {

struct AtomicMeasure {
  std::vector<CVec> z;
  std::vector<double> m;

  std::size_t size() const { return z.size(); }
  int dim() const { return z.empty() ? 0 : static_cast<int>(z[0].size()); }
  double total_mass() const;
  void push(const CVec& point, double mass) {
    z.push_back(point);
    m.push_back(mass);
  }
};

AtomicMeasure rotate(const AtomicMeasure& mu, const CMat& U);

// Projection onto kubes; total mass is conserved exactly (atoms are summed
// in index order into their kubes). Throws if an atom lies beyond the tree.
TreeMeasure discretize(const AtomicMeasure& mu, const BergmanTree& bt,
                       LocateRule rule = LocateRule::ring_first);

// Self-similar leaf measure on a binary-branching tree: each leaf at the
// given depth carries total * prod(w_left/w_right along its path). With the
// default equal split every leaf has mass 2^{-depth} and I* = 2^{-d} on every
// node, so the sigma=1/2 simple constant is exactly 1 while the tree-type
// constant grows linearly with depth. Requires every interior node of the
// tree above `depth` to have exactly two children (full binary or standard
// disk tree).
TreeMeasure cantor_measure(const Tree& t, int depth, double w_left = 0.5,
                           double w_right = 0.5, double total = 1.0);

// Coefficient embedding of the disk with Holder-sigma boundary modulus:
// f(z) = (sqrt(c_m) z^m)_{m=1..trunc}, c_1 = 2 sigma,
// c_m = c_{m-1} (1 - 2 sigma/(m-1)) (m-1)/m; sum_m c_m = 1.
struct LipSigmaEmbedding {
  double sigma = 0.25;
  int trunc = 0;
  std::vector<double> c;  // c[0] unused; coefficients c[1..trunc]
  double tail = 0.0;      // 1 - partial sum

  CVec map(std::complex<double> z) const;
};
LipSigmaEmbedding lip_sigma_embedding(double sigma, int trunc);

// Parametrized disk -> ball surface with derivative data for boundary
// contact classification.
struct CurveSpec {
  std::string name;
  int n = 2;
  bool holomorphic = true;
  // Holomorphic: f and complex derivative df. Otherwise the real partials.
  std::function<CVec(std::complex<double>)> f;
  std::function<CVec(std::complex<double>)> df;
  std::function<CVec(std::complex<double>)> df_dx, df_dy;
};

CurveSpec slice_curve(int n, int coordinate = 0);     // z -> z * e_coordinate
CurveSpec real_circle_surface();                      // x+iy -> (x, y) in C^2
CurveSpec transverse_poly_curve(double a, double b);  // z -> (a z, b z^2)

// Quadrature measure on f({|z| <= rmax}): polar atoms with weight
// (area element) * (1 - |f|^2)^s.
AtomicMeasure curve_measure(const CurveSpec& spec, int radial_samples,
                            int angular_samples, double rmax, double s);

struct TransversalityReport {
  std::string classification;  // "complex_tangential", "transverse", "mixed"
  double min_im_tangent = 0.0;
  double max_im_tangent = 0.0;
  double max_holomorphic_defect = 0.0;  // max |Im<f'T,f> - Re<f'n,f>|
  double tolerance = 1e-6;
};
// Classifies boundary contact from samples of |x| = 1 (or the given radius).
TransversalityReport transversality_classify(const CurveSpec& spec,
                                             int samples,
                                             double radius = 1.0,
                                             double tolerance = 1e-6);

// Circle-invariant measure: each listed ring's mass is split equally among
// its member nodes.
TreeMeasure invariant_measure(
    const BergmanTree& bt,
    const std::vector<std::pair<std::int32_t, double>>& ring_masses);
// Convenience: one mass per level, spread uniformly over that level's nodes.
TreeMeasure invariant_measure_by_level(const BergmanTree& bt,
                                       const std::vector<double>& level_mass);

// Polynomial symbols on C^n (multi-index monomial sums).
struct Poly {
  int n = 1;
  // (exponents, coefficient); exponents has length n.
  std::vector<std::pair<std::vector<int>, std::complex<double>>> terms;

  std::complex<double> eval(const CVec& z) const;
  Poly d(int coord) const;  // partial derivative
  double sup_on_sphere(int samples, std::uint64_t seed) const;
};

// Frobenius norm squared of the order-m derivative tensor at z.
double derivative_tensor_frobenius2(const Poly& f, int m, const CVec& z);

// Derivative-density measure |f^{(m)}(z)|^2 (1-|z|^2)^{2m-n} dV, sampled by a
// seeded quasi-random point set of `budget` atoms in the ball, each weighted
// density * vol(B) / budget.
AtomicMeasure multiplier_measure(const Poly& f, int m, int budget,
                                 std::uint64_t seed, double rmax = 1.0);

// Image measure: atoms map through `map`, masses scale by |delta(x)|^2.
AtomicMeasure pushforward(
    const AtomicMeasure& mu, const std::function<CVec(const CVec&)>& map,
    const std::function<std::complex<double>(const CVec&)>& delta);

}  // namespace carleson
