#include "carleson/measures.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "carleson/quadrature.hpp"
#include "carleson/rng.hpp"

namespace carleson {

namespace {
constexpr double kPi = std::numbers::pi;
}

double AtomicMeasure::total_mass() const {
  double s = 0.0;
  for (double w : m) s += w;
  return s;
}

AtomicMeasure rotate(const AtomicMeasure& mu, const CMat& U) {
  AtomicMeasure out;
  out.z.reserve(mu.z.size());
  out.m = mu.m;
  for (const auto& p : mu.z) out.z.push_back(U * p);
  return out;
}

TreeMeasure discretize(const AtomicMeasure& mu, const BergmanTree& bt,
                       LocateRule rule) {
  std::vector<std::pair<NodeId, double>> weights;
  weights.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    weights.emplace_back(locate(bt, mu.z[i], rule), mu.m[i]);
  }
  return TreeMeasure(bt.tree, weights);
}

TreeMeasure cantor_measure(const Tree& t, int depth, double w_left,
                           double w_right, double total) {
  if (depth < 0 || depth > t.max_depth())
    throw std::invalid_argument("cantor_measure: depth out of range");
  if (w_left < 0 || w_right < 0)
    throw std::invalid_argument("cantor_measure: negative branch weight");
  std::vector<std::pair<NodeId, double>> leaves;
  std::vector<std::pair<NodeId, double>> stack{{t.root(), total}};
  while (!stack.empty()) {
    auto [v, w] = stack.back();
    stack.pop_back();
    if (t.depth(v) == depth) {
      leaves.emplace_back(v, w);
      continue;
    }
    const auto& kids = t.children(v);
    if (kids.size() != 2)
      throw std::invalid_argument(
          "cantor_measure: tree is not binary above the requested depth");
    stack.emplace_back(kids[0], w * w_left);
    stack.emplace_back(kids[1], w * w_right);
  }
  return TreeMeasure(t, leaves);
}

LipSigmaEmbedding lip_sigma_embedding(double sigma, int trunc) {
  if (!(sigma > 0.0 && sigma < 0.5))
    throw std::invalid_argument("lip_sigma_embedding: need 0 < sigma < 1/2");
  if (trunc < 1) throw std::invalid_argument("lip_sigma_embedding: trunc >= 1");
  LipSigmaEmbedding e;
  e.sigma = sigma;
  e.trunc = trunc;
  e.c.assign(static_cast<std::size_t>(trunc) + 1, 0.0);
  e.c[1] = 2.0 * sigma;
  double sum = e.c[1];
  for (int m = 2; m <= trunc; ++m) {
    e.c[m] = e.c[m - 1] * (1.0 - 2.0 * sigma / (m - 1)) * (m - 1) / m;
    sum += e.c[m];
  }
  e.tail = 1.0 - sum;
  return e;
}

CVec LipSigmaEmbedding::map(std::complex<double> z) const {
  CVec out(trunc);
  std::complex<double> p = 1.0;
  for (int m = 1; m <= trunc; ++m) {
    p *= z;
    out[m - 1] = std::sqrt(c[m]) * p;
  }
  return out;
}

CurveSpec slice_curve(int n, int coordinate) {
  if (coordinate < 0 || coordinate >= n)
    throw std::invalid_argument("slice_curve: coordinate out of range");
  CurveSpec s;
  s.name = "slice";
  s.n = n;
  s.holomorphic = true;
  s.f = [n, coordinate](std::complex<double> z) {
    CVec v = CVec::Zero(n);
    v[coordinate] = z;
    return v;
  };
  s.df = [n, coordinate](std::complex<double>) {
    CVec v = CVec::Zero(n);
    v[coordinate] = 1.0;
    return v;
  };
  return s;
}

CurveSpec real_circle_surface() {
  CurveSpec s;
  s.name = "real_circle";
  s.n = 2;
  s.holomorphic = false;
  s.f = [](std::complex<double> z) {
    CVec v(2);
    v[0] = z.real();
    v[1] = z.imag();
    return v;
  };
  s.df_dx = [](std::complex<double>) {
    CVec v(2);
    v[0] = 1.0;
    v[1] = 0.0;
    return v;
  };
  s.df_dy = [](std::complex<double>) {
    CVec v(2);
    v[0] = 0.0;
    v[1] = 1.0;
    return v;
  };
  return s;
}

CurveSpec transverse_poly_curve(double a, double b) {
  CurveSpec s;
  s.name = "transverse_poly";
  s.n = 2;
  s.holomorphic = true;
  s.f = [a, b](std::complex<double> z) {
    CVec v(2);
    v[0] = a * z;
    v[1] = b * z * z;
    return v;
  };
  s.df = [a, b](std::complex<double> z) {
    CVec v(2);
    v[0] = a;
    v[1] = 2.0 * b * z;
    return v;
  };
  return s;
}

namespace {

// Area scale factor of the parametrization at z (Gram determinant root).
double area_scale(const CurveSpec& spec, std::complex<double> z) {
  if (spec.holomorphic) {
    return spec.df(z).squaredNorm();
  }
  CVec u = spec.df_dx(z);
  CVec v = spec.df_dy(z);
  double uu = u.squaredNorm();
  double vv = v.squaredNorm();
  double uv = herm(u, v).real();
  return std::sqrt(std::max(uu * vv - uv * uv, 0.0));
}

CVec directional_derivative(const CurveSpec& spec, std::complex<double> z,
                            std::complex<double> dir) {
  if (spec.holomorphic) return CVec(dir * spec.df(z));
  return CVec(dir.real() * spec.df_dx(z) + dir.imag() * spec.df_dy(z));
}

}  // namespace

AtomicMeasure curve_measure(const CurveSpec& spec, int radial_samples,
                            int angular_samples, double rmax, double s) {
  if (radial_samples < 1 || angular_samples < 1)
    throw std::invalid_argument("curve_measure: need positive sample counts");
  if (!(rmax > 0.0)) throw std::invalid_argument("curve_measure: rmax > 0");
  AtomicMeasure mu;
  mu.z.reserve(static_cast<std::size_t>(radial_samples) * angular_samples);
  const double dr = rmax / radial_samples;
  const double dphi = 2.0 * kPi / angular_samples;
  for (int i = 0; i < radial_samples; ++i) {
    double r = (i + 0.5) * dr;
    for (int j = 0; j < angular_samples; ++j) {
      double phi = (j + 0.5) * dphi;
      std::complex<double> z = std::polar(r, phi);
      CVec fz = spec.f(z);
      double gap = std::max(1.0 - fz.squaredNorm(), 0.0);
      double w = area_scale(spec, z) * std::pow(gap, s) * r * dr * dphi;
      if (w > 0.0) mu.push(fz, w);
    }
  }
  return mu;
}

TransversalityReport transversality_classify(const CurveSpec& spec,
                                             int samples, double radius,
                                             double tolerance) {
  if (samples < 1)
    throw std::invalid_argument("transversality_classify: samples >= 1");
  TransversalityReport rep;
  rep.tolerance = tolerance;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double defect = 0.0;
  for (int k = 0; k < samples; ++k) {
    double theta = 2.0 * kPi * (k + 0.5) / samples;
    std::complex<double> x = std::polar(radius, theta);
    CVec fx = spec.f(x);
    std::complex<double> ix(-x.imag(), x.real());
    CVec along_tangent = directional_derivative(spec, x, ix);
    CVec along_normal = directional_derivative(spec, x, x);
    // <u, v> = sum_j u_j conj(v_j) = herm(v, u)
    double im_t = herm(fx, along_tangent).imag();
    double re_n = herm(fx, along_normal).real();
    lo = std::min(lo, std::abs(im_t));
    hi = std::max(hi, std::abs(im_t));
    defect = std::max(defect, std::abs(im_t - re_n));
  }
  rep.min_im_tangent = lo;
  rep.max_im_tangent = hi;
  rep.max_holomorphic_defect = defect;
  if (hi <= tolerance)
    rep.classification = "complex_tangential";
  else if (lo > tolerance)
    rep.classification = "transverse";
  else
    rep.classification = "mixed";
  return rep;
}

TreeMeasure invariant_measure(
    const BergmanTree& bt,
    const std::vector<std::pair<std::int32_t, double>>& ring_masses) {
  std::vector<std::pair<NodeId, double>> weights;
  for (auto [rid, mass] : ring_masses) {
    if (rid < 0 || rid >= static_cast<std::int32_t>(bt.rings.size()))
      throw std::invalid_argument("invariant_measure: ring id out of range");
    if (mass < 0.0)
      throw std::invalid_argument("invariant_measure: negative ring mass");
    const Ring& ring = bt.rings[rid];
    double per = mass / ring.npoints;
    for (int j = 0; j < ring.npoints; ++j)
      weights.emplace_back(ring.first_node + j, per);
  }
  return TreeMeasure(bt.tree, weights);
}

TreeMeasure invariant_measure_by_level(const BergmanTree& bt,
                                       const std::vector<double>& level_mass) {
  std::vector<std::pair<std::int32_t, double>> ring_masses;
  for (std::size_t lvl = 0; lvl < level_mass.size(); ++lvl) {
    if (lvl >= bt.rings_by_level.size())
      throw std::invalid_argument("invariant_measure_by_level: level too deep");
    const auto& ring_ids = bt.rings_by_level[lvl];
    int total_nodes = 0;
    for (auto rid : ring_ids) total_nodes += bt.rings[rid].npoints;
    for (auto rid : ring_ids) {
      double frac = static_cast<double>(bt.rings[rid].npoints) / total_nodes;
      ring_masses.emplace_back(rid, level_mass[lvl] * frac);
    }
  }
  return invariant_measure(bt, ring_masses);
}

std::complex<double> Poly::eval(const CVec& z) const {
  std::complex<double> acc = 0.0;
  for (const auto& [exps, coeff] : terms) {
    std::complex<double> t = coeff;
    for (int k = 0; k < n; ++k)
      for (int e = 0; e < exps[k]; ++e) t *= z[k];
    acc += t;
  }
  return acc;
}

Poly Poly::d(int coord) const {
  if (coord < 0 || coord >= n)
    throw std::invalid_argument("Poly::d: coordinate out of range");
  Poly out;
  out.n = n;
  for (const auto& [exps, coeff] : terms) {
    if (exps[coord] == 0) continue;
    auto e2 = exps;
    e2[coord] -= 1;
    out.terms.emplace_back(std::move(e2),
                           coeff * static_cast<double>(exps[coord]));
  }
  return out;
}

double Poly::sup_on_sphere(int samples, std::uint64_t seed) const {
  Rng rng(seed);
  double best = 0.0;
  for (int k = 0; k < samples; ++k) {
    CVec z(n);
    for (int j = 0; j < n; ++j) z[j] = rng.complex_gaussian();
    double nn = z.norm();
    if (nn == 0.0) continue;
    z /= nn;
    best = std::max(best, std::abs(eval(z)));
  }
  return best;
}

namespace {

void enumerate_multiindices(int n, int total, std::vector<int>& cur, int pos,
                            std::vector<std::vector<int>>& out) {
  if (pos == n - 1) {
    cur[pos] = total;
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= total; ++e) {
    cur[pos] = e;
    enumerate_multiindices(n, total - e, cur, pos + 1, out);
  }
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

double derivative_tensor_frobenius2(const Poly& f, int m, const CVec& z) {
  if (m < 0) throw std::invalid_argument("derivative order must be >= 0");
  if (m == 0) return std::norm(f.eval(z));
  std::vector<std::vector<int>> betas;
  std::vector<int> cur(f.n, 0);
  enumerate_multiindices(f.n, m, cur, 0, betas);
  double total = 0.0;
  for (const auto& beta : betas) {
    Poly g = f;
    double multinomial = factorial(m);
    for (int k = 0; k < f.n; ++k) {
      multinomial /= factorial(beta[k]);
      for (int e = 0; e < beta[k]; ++e) g = g.d(k);
    }
    total += multinomial * std::norm(g.eval(z));
  }
  return total;
}

AtomicMeasure multiplier_measure(const Poly& f, int m, int budget,
                                 std::uint64_t seed, double rmax) {
  if (budget < 1) throw std::invalid_argument("multiplier_measure: budget");
  const int n = f.n;
  std::vector<CVec> pts = halton_ball(n, budget, seed);
  if (pts.empty()) return {};
  // vol(B^{2n}(rmax)) = pi^n / n! * rmax^{2n}
  double vol = std::pow(kPi, n) / factorial(n) * std::pow(rmax, 2 * n);
  double per = vol / static_cast<double>(pts.size());
  double power = 2.0 * m - n;
  AtomicMeasure mu;
  mu.z.reserve(pts.size());
  for (auto& p : pts) {
    CVec z = rmax * p;
    double gap = std::max(1.0 - z.squaredNorm(), 0.0);
    if (gap <= 0.0) continue;
    double density =
        derivative_tensor_frobenius2(f, m, z) * std::pow(gap, power);
    if (density > 0.0) mu.push(z, density * per);
  }
  return mu;
}

AtomicMeasure pushforward(
    const AtomicMeasure& mu, const std::function<CVec(const CVec&)>& map,
    const std::function<std::complex<double>(const CVec&)>& delta) {
  AtomicMeasure out;
  out.z.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double scale = delta ? std::norm(delta(mu.z[i])) : 1.0;
    out.push(map(mu.z[i]), mu.m[i] * scale);
  }
  return out;
}

}  // namespace carleson
