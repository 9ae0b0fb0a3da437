#include "carleson/kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "carleson/conditions.hpp"
#include "carleson/quadrature.hpp"
#include "carleson/rng.hpp"

namespace carleson {

namespace {
constexpr double kPi = std::numbers::pi;

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}
}  // namespace

std::complex<double> kernel_eval(const KernelSpec& spec, const CVec& w,
                                 const CVec& z) {
  std::complex<double> value;
  switch (spec.family) {
    case KernelFamily::besov_sobolev:
      value = std::pow(1.0 - herm(w, z), -2.0 * spec.sigma);
      break;
    case KernelFamily::drury_arveson:
      value = 1.0 / (1.0 - herm(w, z));
      break;
    case KernelFamily::ring_domain: {
      if (w.size() != 1 || z.size() != 1)
        throw std::invalid_argument("ring_domain kernel is one-dimensional");
      const double L2 = spec.L * spec.L;
      const double c = L2 / (1.0 + L2 * L2);
      std::complex<double> u = std::conj(w[0]) * z[0];
      value = 1.0 / (1.0 - c * u - c / u);
      break;
    }
    case KernelFamily::np_pullback: {
      if (!spec.embedding)
        throw std::invalid_argument("np_pullback needs an embedding");
      value = 1.0 / (1.0 - herm(spec.embedding(w), spec.embedding(z)));
      break;
    }
  }
  return spec.scale * value;
}

namespace {

Eigen::MatrixXd real_kernel_gram(const AtomicMeasure& mu,
                                 const KernelSpec& spec, bool with_masses) {
  const auto count = static_cast<Eigen::Index>(mu.size());
  Eigen::MatrixXd A(count, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < count; ++j) {
      std::complex<double> k = kernel_eval(spec, mu.z[i], mu.z[j]);
      double v = spec.variant == KernelVariant::modulus ? std::abs(k)
                                                        : k.real();
      if (with_masses) v *= std::sqrt(mu.m[i] * mu.m[j]);
      A(i, j) = v;
    }
  }
  return A;
}

}  // namespace

double kernel_carleson_oracle(const AtomicMeasure& mu,
                              const KernelSpec& spec) {
  if (mu.size() == 0) return 0.0;
  if (mu.size() > static_cast<std::size_t>(kOracleAtomCap))
    throw std::length_error("kernel_carleson_oracle: too many atoms");

  if (spec.variant == KernelVariant::full_complex) {
    const auto count = static_cast<Eigen::Index>(mu.size());
    CMat A(count, count);
    for (Eigen::Index i = 0; i < count; ++i)
      for (Eigen::Index j = 0; j < count; ++j)
        A(i, j) = kernel_eval(spec, mu.z[i], mu.z[j]) *
                  std::sqrt(mu.m[i] * mu.m[j]);
    double asym = (A - A.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-10)
      throw std::runtime_error("kernel oracle: matrix not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (A + A.adjoint()),
                                            Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
  }

  Eigen::MatrixXd A = real_kernel_gram(mu, spec, true);
  double scale = std::max(A.cwiseAbs().maxCoeff(), 1.0);
  double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw std::runtime_error("kernel oracle: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

TransferReport kernel_comparison_transfer(const KernelSpec& a,
                                          const KernelSpec& b,
                                          const AtomicMeasure& mu,
                                          double rel_tol) {
  TransferReport rep;
  if (mu.size() == 0) {
    rep.dominated = true;
    return rep;
  }
  Eigen::MatrixXd ka = real_kernel_gram(mu, a, false);
  Eigen::MatrixXd kb = real_kernel_gram(mu, b, false);
  double factor = 0.0;
  for (Eigen::Index i = 0; i < ka.rows(); ++i)
    for (Eigen::Index j = 0; j < ka.cols(); ++j) {
      if (kb(i, j) > 0.0)
        factor = std::max(factor, ka(i, j) / kb(i, j));
      else if (ka(i, j) > 0.0)
        factor = std::numeric_limits<double>::infinity();
    }
  rep.pointwise_factor = factor;
  rep.oracle_a = kernel_carleson_oracle(mu, a);
  rep.oracle_b = kernel_carleson_oracle(mu, b);
  rep.dominated =
      rep.oracle_a <= factor * rep.oracle_b * (1.0 + rel_tol) + 1e-12;
  return rep;
}

NPResult np_one_positive_eigenvalue(const std::vector<CVec>& Z, double sigma,
                                    double tol) {
  NPResult res;
  if (Z.empty()) return res;
  const auto m = static_cast<Eigen::Index>(Z.size());
  CMat H(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      H(i, j) = std::pow(1.0 - herm(Z[j], Z[i]), 2.0 * sigma);
  Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (H + H.adjoint()),
                                          Eigen::EigenvaluesOnly);
  res.spectrum.assign(eig.eigenvalues().data(),
                      eig.eigenvalues().data() + m);
  for (double v : res.spectrum)
    if (v > tol) ++res.positives;
  res.one_positive = res.positives == 1;
  return res;
}

GramReport gram_interpolation_test(const std::vector<CVec>& Z, double sigma,
                                   const BergmanTree* bt) {
  GramReport rep;
  if (Z.empty()) throw std::invalid_argument("gram test: empty point list");
  for (std::size_t i = 0; i < Z.size(); ++i)
    for (std::size_t j = i + 1; j < Z.size(); ++j)
      if (Z[i].size() == Z[j].size() && (Z[i] - Z[j]).squaredNorm() == 0.0)
        throw std::invalid_argument("gram test: duplicate points");

  KernelSpec spec;
  spec.family = KernelFamily::besov_sobolev;
  spec.sigma = sigma;

  const auto m = static_cast<Eigen::Index>(Z.size());
  CMat G(m, m);
  std::vector<double> self(Z.size());
  for (std::size_t i = 0; i < Z.size(); ++i)
    self[i] = kernel_eval(spec, Z[i], Z[i]).real();
  rep.separation = std::numeric_limits<double>::infinity();
  rep.separation_infinite = Z.size() < 2;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      G(i, j) = kernel_eval(spec, Z[i], Z[j]) / std::sqrt(self[i] * self[j]);
      if (i < j) {
        rep.max_offdiag = std::max(rep.max_offdiag, std::abs(G(i, j)));
        rep.separation = std::min(rep.separation, bergman_metric(Z[i], Z[j]));
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (G + G.adjoint()),
                                          Eigen::EigenvaluesOnly);
  rep.gram_norm = eig.eigenvalues().maxCoeff();
  Eigen::MatrixXd absg = G.cwiseAbs();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eiga(
      0.5 * (absg + absg.transpose()), Eigen::EigenvaluesOnly);
  rep.abs_gram_norm = eiga.eigenvalues().maxCoeff();

  AtomicMeasure muz;
  for (const auto& z : Z)
    muz.push(z, std::pow(1.0 - z.squaredNorm(), 2.0 * sigma));
  spec.variant = KernelVariant::re;
  rep.oracle_constant = kernel_carleson_oracle(muz, spec);
  if (bt != nullptr) {
    rep.has_tree = true;
    rep.tree_condition_constant =
        tree_condition(discretize(muz, *bt), sigma).constant;
  }
  return rep;
}

RingDomainReport ring_domain_norms(double L, int n_max, int quad_points,
                                   int pair_samples, std::uint64_t seed) {
  if (!(L > 1.0)) throw std::domain_error("ring_domain_norms: L > 1 required");
  if (n_max < 0 || quad_points < 8)
    throw std::invalid_argument("ring_domain_norms: bad sizes");

  RingDomainReport rep;
  rep.L = L;
  const double L2 = L * L;
  const double L4 = L2 * L2;
  const double c = L2 / (1.0 + L4);
  rep.corrected_constant = (L4 + 1.0) / (L4 - 1.0);
  rep.printed_constant = (L4 + 1.0) / (L2 - 1.0);

  // Fourier coefficient at order zero of u -> 1/(1 - c u - c/u) on |u|=1.
  // The Laurent expansion says this equals the series multiplier.
  std::complex<double> hat0 = 0.0;
  for (int t = 0; t < quad_points; ++t) {
    double theta = 2.0 * kPi * t / quad_points;
    std::complex<double> u = std::polar(1.0, theta);
    hat0 += 1.0 / (1.0 - c * u - c / u);
  }
  hat0 /= static_cast<double>(quad_points);
  rep.series_coefficient = hat0.real();

  for (int n = -n_max; n <= n_max; ++n) {
    RingNormRow row;
    row.n = n;
    const int an = std::abs(n);
    // Boundary quadrature of |z^n|^2 against d(theta)/2pi on both circles.
    double outer = 0.0, inner = 0.0;
    for (int t = 0; t < quad_points; ++t) {
      double theta = 2.0 * kPi * t / quad_points;
      outer += std::norm(std::pow(std::polar(L, theta), n));
      inner += std::norm(std::pow(std::polar(1.0 / L, theta), n));
    }
    row.h2_quadrature = (outer + inner) / quad_points;
    row.h2_formula = std::pow(L2, an) + std::pow(L2, -an);
    row.hk_series = std::pow(L2, an) / rep.series_coefficient;
    row.hk_formula = (L4 - 1.0) / (L4 + 1.0) * std::pow(L2, an);
    rep.max_h2_error = std::max(
        rep.max_h2_error, std::abs(row.h2_quadrature - row.h2_formula) /
                              row.h2_formula);
    rep.max_hk_error = std::max(
        rep.max_hk_error,
        std::abs(row.hk_series - row.hk_formula) / row.hk_formula);
    double ratio = row.h2_formula / row.hk_formula;
    if (rep.rows.empty()) {
      rep.min_norm_ratio = ratio;
      rep.max_norm_ratio = ratio;
    } else {
      rep.min_norm_ratio = std::min(rep.min_norm_ratio, ratio);
      rep.max_norm_ratio = std::max(rep.max_norm_ratio, ratio);
    }
    rep.rows.push_back(row);
  }

  // Pointwise identity check on sampled pairs, radii kept off the boundary
  // so the Laurent series converges at a uniform geometric rate.
  Rng rng(seed);
  const double span = 0.75 * std::log(L);
  for (int s = 0; s < pair_samples; ++s) {
    std::complex<double> z =
        std::polar(std::exp(rng.uniform(-span, span)),
                   rng.uniform(0.0, 2.0 * kPi));
    std::complex<double> w =
        std::polar(std::exp(rng.uniform(-span, span)),
                   rng.uniform(0.0, 2.0 * kPi));
    std::complex<double> u = std::conj(z) * w;
    std::complex<double> direct = 1.0 / (1.0 - c * u - c / u);
    std::complex<double> series = 1.0;
    std::complex<double> up = 1.0, um = 1.0;
    for (int n = 1; n <= 4000; ++n) {
      up *= u / L2;
      um /= u * L2;
      series += up + um;
      if (std::abs(up) + std::abs(um) < 1e-16 * std::abs(series)) break;
    }
    rep.max_identity_residual =
        std::max(rep.max_identity_residual,
                 std::abs(direct - rep.corrected_constant * series));
    rep.printed_constant_residual =
        std::max(rep.printed_constant_residual,
                 std::abs(direct - rep.printed_constant * series));
  }
  return rep;
}

double delta_sigma_metric(const CVec& x, const CVec& y, double sigma) {
  KernelSpec spec;
  spec.family = KernelFamily::besov_sobolev;
  spec.sigma = sigma;
  double kxx = kernel_eval(spec, x, x).real();
  double kyy = kernel_eval(spec, y, y).real();
  double cross = std::norm(kernel_eval(spec, x, y));
  return std::sqrt(std::max(1.0 - cross / (kxx * kyy), 0.0));
}

LipIsometryReport lip_isometry_check(double sigma, int pairs, int trunc,
                                     std::uint64_t seed, double rmax) {
  LipIsometryReport rep;
  rep.pairs = pairs;
  rep.trunc = trunc;
  LipSigmaEmbedding emb = lip_sigma_embedding(sigma, trunc);
  rep.coeff_band_lo = std::numeric_limits<double>::infinity();
  rep.coeff_band_hi = 0.0;
  for (int m = 1; m <= trunc; ++m) {
    double scaled = emb.c[m] * std::pow(m, 1.0 + 2.0 * sigma);
    rep.coeff_band_lo = std::min(rep.coeff_band_lo, scaled);
    rep.coeff_band_hi = std::max(rep.coeff_band_hi, scaled);
  }
  Rng rng(seed);
  for (int s = 0; s < pairs; ++s) {
    std::complex<double> x = std::polar(rmax * std::sqrt(rng.uniform()),
                                        rng.uniform(0.0, 2.0 * kPi));
    std::complex<double> y = std::polar(rmax * std::sqrt(rng.uniform()),
                                        rng.uniform(0.0, 2.0 * kPi));
    CVec xv(1), yv(1);
    xv[0] = x;
    yv[0] = y;
    double left = delta_sigma_metric(xv, yv, sigma);
    double right = delta_sigma_metric(emb.map(x), emb.map(y), 0.5);
    rep.max_defect = std::max(rep.max_defect, std::abs(left - right));
  }
  return rep;
}

PotentialReport potential_operator_check(const AtomicMeasure& mu, double sigma,
                                         const std::vector<double>& alphas,
                                         int radial_nodes, int sphere_points,
                                         std::uint64_t seed, double rmax) {
  PotentialReport rep;
  rep.sigma = sigma;
  rep.radial_nodes = radial_nodes;
  rep.sphere_points = sphere_points;
  rep.rmax = rmax;
  if (alphas.empty()) return rep;
  if (mu.size() == 0) {
    for (double a : alphas) rep.rows.push_back({a, 0.0, 0.0});
    rep.stability_ratio = 0.0;
    return rep;
  }

  const int n = mu.dim();
  std::vector<double> rad, radw;
  gauss_legendre(radial_nodes, 0.0, rmax, rad, radw);
  auto sphere = halton_sphere(n, sphere_points, seed);
  const double area = 2.0 * std::pow(kPi, n) / factorial(n - 1);

  // Quadrature points and alpha-independent weights.
  const Eigen::Index q =
      static_cast<Eigen::Index>(rad.size()) * sphere.size();
  std::vector<CVec> pts;
  pts.reserve(q);
  Eigen::VectorXd base(q), gap(q);
  Eigen::Index idx = 0;
  for (std::size_t t = 0; t < rad.size(); ++t) {
    double r = rad[t];
    double w = radw[t] * std::pow(r, 2 * n - 1) * area /
               static_cast<double>(sphere.size());
    for (const auto& zeta : sphere) {
      pts.push_back(r * zeta);
      base[idx] = w;
      gap[idx] = 1.0 - r * r;
      ++idx;
    }
  }

  const auto atoms = static_cast<Eigen::Index>(mu.size());
  Eigen::VectorXd scaled(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const double alpha = alphas[a];
    const double expo = 0.5 * (n + 1 + alpha) + sigma;
    Eigen::MatrixXd phi(atoms, q);
    for (Eigen::Index i = 0; i < atoms; ++i) {
      double root = std::sqrt(mu.m[i]);
      for (Eigen::Index p = 0; p < q; ++p)
        phi(i, p) =
            root * std::pow(std::abs(1.0 - herm(mu.z[i], pts[p])), -expo);
    }
    Eigen::VectorXd wq = base.array() * gap.array().pow(alpha);
    Eigen::MatrixXd M = phi * wq.asDiagonal() * phi.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
    double c2 = std::max(eig.eigenvalues().maxCoeff(), 0.0);
    PotentialRow row;
    row.alpha = alpha;
    row.c_alpha = std::sqrt(c2);
    row.scaled = (1.0 + alpha) * c2;
    scaled[static_cast<Eigen::Index>(a)] = row.scaled;
    rep.rows.push_back(row);
  }
  double lo = scaled.minCoeff(), hi = scaled.maxCoeff();
  rep.stability_ratio = lo > 0.0
                            ? hi / lo
                            : (hi > 0.0
                                   ? std::numeric_limits<double>::infinity()
                                   : 0.0);
  return rep;
}

}  // namespace carleson
