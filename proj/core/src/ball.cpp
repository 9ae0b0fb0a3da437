#include "carleson/ball.hpp"

#include <cmath>
#include <stdexcept>

namespace carleson {

double bergman_metric(const CVec& z, const CVec& w) {
  const double az = abs2(z), aw = abs2(w);
  if (az >= 1.0 || aw >= 1.0)
    throw std::invalid_argument("bergman_metric: point outside the open ball");
  const double denom = std::norm(std::complex<double>(1.0, 0.0) - herm(w, z));
  double one_minus = (1.0 - az) * (1.0 - aw) / denom;
  if (one_minus > 1.0) one_minus = 1.0;  // z == w up to rounding
  if (one_minus < 1e-300) one_minus = 1e-300;
  const double phi = std::sqrt(1.0 - one_minus);
  return std::atanh(phi);
}

CVec mobius(const CVec& a, const CVec& z) {
  const double a2 = abs2(a);
  if (a2 == 0.0) return -z;
  const double s = std::sqrt(1.0 - a2);
  const CVec pz = slice_project(a, z);
  const CVec qz = z - pz;
  const std::complex<double> den =
      std::complex<double>(1.0, 0.0) - herm(a, z);
  return (a - pz - s * qz) / den;
}

CVec slice_project(const CVec& z, const CVec& w) {
  const double z2 = abs2(z);
  if (z2 == 0.0) throw std::invalid_argument("slice_project: z = 0");
  return (herm(z, w) / z2) * z;
}

bool tent_membership(const CVec& z, const CVec& w) {
  const double aw = std::sqrt(abs2(w));
  if (aw == 0.0) return true;
  const CVec pw = w / aw;
  const double lhs = std::abs(std::complex<double>(1.0, 0.0) - herm(z, pw));
  return lhs <= 1.0 - aw + 1e-15;
}

CMat haar_unitary(int n, Rng& rng) {
  CMat A(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) A(i, j) = rng.complex_gaussian();
  Eigen::HouseholderQR<CMat> qr(A);
  CMat Q = qr.householderQ();
  CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    std::complex<double> d = R(j, j);
    const double ad = std::abs(d);
    const std::complex<double> phase = (ad == 0.0) ? 1.0 : d / ad;
    Q.col(j) *= phase;
  }
  return Q;
}

double projective_circle_metric(const CVec& u, const CVec& v, double r) {
  // Minimum over phases of |1 - herm(e^{is} r v, r u)| is 1 - r^2 |herm(v,u)|.
  const double dot = std::abs(herm(v, u));
  const double denom = 1.0 - r * r * dot;
  double one_minus = (1.0 - r * r) * (1.0 - r * r) / (denom * denom);
  if (one_minus > 1.0) one_minus = 1.0;
  return std::atanh(std::sqrt(1.0 - one_minus));
}

}  // namespace carleson
