#pragma once
// Reproducing-kernel numerics: exact atomic embedding constants via kernel
// Gram eigenvalues, pullback comparisons between kernel families, spectral
// one-positive-eigenvalue tests for interpolation matrices, the annulus
// domain where norms are computable two ways, the kernel-induced boundary
// metric with its disk-to-infinite-ball isometry, and the weighted potential
// operators whose constants stabilize under the (1+alpha) normalization.

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "carleson/ball.hpp"
#include "carleson/measures.hpp"

namespace carleson {

enum class KernelFamily {
  besov_sobolev,  // (1 - herm(w,z))^{-2 sigma}, principal branch
  drury_arveson,  // sigma = 1/2 specialization
  ring_domain,    // annulus 1/L < |z| < L kernel in the product z conj * w
  np_pullback     // kernel composed with an embedding map of the disk
};

enum class KernelVariant { re, modulus, full_complex };

struct KernelSpec {
  KernelFamily family = KernelFamily::drury_arveson;
  KernelVariant variant = KernelVariant::re;
  double sigma = 0.5;  // besov_sobolev exponent
  double L = 2.0;      // ring_domain modulus bound, L > 1
  std::function<CVec(const CVec&)> embedding;  // np_pullback composition
  double scale = 1.0;  // overall multiplier (comparison suites)
};

std::complex<double> kernel_eval(const KernelSpec& spec, const CVec& w,
                                 const CVec& z);

// Exact embedding constant of an atomic measure: the top eigenvalue of
// [variant(k(z_i, z_j)) sqrt(m_i m_j)]. Real variants must be symmetric to
// 1e-10 (runtime error otherwise); throws std::length_error above 2000
// atoms.
double kernel_carleson_oracle(const AtomicMeasure& mu, const KernelSpec& spec);

inline constexpr int kOracleAtomCap = 2000;

struct TransferReport {
  double pointwise_factor = 0.0;  // max entry ratio Re k / Re k' on the grid
  double oracle_a = 0.0;
  double oracle_b = 0.0;
  bool dominated = false;  // oracle_a <= pointwise_factor * oracle_b (+tol)
};

// If one kernel dominates another entrywise on the atom grid, the embedding
// constants must order the same way; checked numerically.
TransferReport kernel_comparison_transfer(const KernelSpec& a,
                                          const KernelSpec& b,
                                          const AtomicMeasure& mu,
                                          double rel_tol = 1e-9);

struct NPResult {
  bool one_positive = false;
  int positives = 0;
  std::vector<double> spectrum;  // ascending
};

// Spectrum of H[i,j] = (1 - herm(z_j, z_i))^{2 sigma}; counts eigenvalues
// above the tolerance.
NPResult np_one_positive_eigenvalue(const std::vector<CVec>& Z, double sigma,
                                    double tol = 1e-8);

struct GramReport {
  double separation = 0.0;  // min pairwise invariant distance
  bool separation_infinite = false;
  double gram_norm = 0.0;      // top eigenvalue of the normalized Gram
  double abs_gram_norm = 0.0;  // same for the entrywise absolute values
  double max_offdiag = 0.0;    // max |G_ij|, i != j (Cauchy-Schwarz < 1)
  bool has_tree = false;
  double tree_condition_constant = 0.0;  // of the induced atomic measure
  double oracle_constant = 0.0;
};

// Interpolation-sequence diagnostics at exponent sigma; the induced measure
// weights atoms by (1-|z|^2)^{2 sigma}. Throws on duplicate points.
GramReport gram_interpolation_test(const std::vector<CVec>& Z, double sigma,
                                   const BergmanTree* bt = nullptr);

struct RingNormRow {
  int n = 0;
  double h2_quadrature = 0.0;
  double h2_formula = 0.0;  // L^{2|n|} + L^{-2|n|}
  double hk_series = 0.0;   // L^{2|n|} / (extracted series coefficient)
  double hk_formula = 0.0;  // (L^4-1)/(L^4+1) L^{2|n|}
};

struct RingDomainReport {
  double L = 0.0;
  std::vector<RingNormRow> rows;
  double max_h2_error = 0.0;             // quadrature vs formula
  double max_hk_error = 0.0;             // series vs formula
  double max_identity_residual = 0.0;    // kernel vs series, sampled pairs
  double series_coefficient = 0.0;       // Fourier coefficient at n = 0
  double corrected_constant = 0.0;       // (L^4+1)/(L^4-1)
  double printed_constant = 0.0;         // (L^4+1)/(L^2-1): fails the check
  double printed_constant_residual = 0.0;
  double min_norm_ratio = 0.0;  // H2 over Hk, bounded above and below in n
  double max_norm_ratio = 0.0;
};

// Monomial norms on the annulus 1/L < |z| < L computed by boundary
// quadrature and from the kernel's Laurent expansion, plus a pointwise check
// of the partial-fraction identity
//   k(z, w) = (L^4+1)/(L^4-1) sum_n (conj(z) w)^n / L^{2|n|}.
RingDomainReport ring_domain_norms(double L, int n_max, int quad_points = 4096,
                                   int pair_samples = 1000,
                                   std::uint64_t seed = 5);

// Kernel-induced boundary metric sqrt(1 - |k(x,y)|^2 / (k(x,x) k(y,y))).
double delta_sigma_metric(const CVec& x, const CVec& y, double sigma);

struct LipIsometryReport {
  double max_defect = 0.0;  // | delta_sigma(x,y) - delta_{1/2}(f(x),f(y)) |
  int pairs = 0;
  int trunc = 0;
  double coeff_band_lo = 0.0;  // range of c_m m^{1+2 sigma}
  double coeff_band_hi = 0.0;
};

// The coefficient embedding carries the disk metric delta_sigma to the
// exponent-1/2 metric of the truncation ball, up to the truncation tail.
LipIsometryReport lip_isometry_check(double sigma, int pairs, int trunc,
                                     std::uint64_t seed, double rmax = 0.9);

struct PotentialRow {
  double alpha = 0.0;
  double c_alpha = 0.0;  // best constant estimate at this alpha
  double scaled = 0.0;   // (1 + alpha) * c_alpha^2
};

struct PotentialReport {
  double sigma = 0.0;
  std::vector<PotentialRow> rows;
  double stability_ratio = 0.0;  // max scaled / min scaled over the grid
  int radial_nodes = 0;
  int sphere_points = 0;
  double rmax = 1.0;
};

// Best-constant estimates for the weighted potential operator across an
// alpha grid, via the Gram matrix of the kernels in L^2((1-|w|^2)^alpha).
// The normalized quantity (1+alpha) c_alpha^2 should be stable in alpha.
PotentialReport potential_operator_check(const AtomicMeasure& mu, double sigma,
                                         const std::vector<double>& alphas,
                                         int radial_nodes = 48,
                                         int sphere_points = 256,
                                         std::uint64_t seed = 11,
                                         double rmax = 1.0);

}  // namespace carleson
