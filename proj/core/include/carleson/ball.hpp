#pragma once
// Geometry of the unit ball of C^n: invariant (Bergman) metric, Mobius
// involutions, slice projections, tents, and Haar-random unitaries. The
// Hermitian pairing convention is herm(w, z) = conj(w) . z.

#include <Eigen/Dense>

#include <complex>

#include "carleson/rng.hpp"

namespace carleson {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline std::complex<double> herm(const CVec& w, const CVec& z) {
  return w.dot(z);  // Eigen's dot conjugates the first argument
}

inline double abs2(const CVec& z) { return z.squaredNorm(); }

// beta(z, w) = atanh |phi_z(w)|, computed through the invariant identity
// 1 - |phi_z(w)|^2 = (1-|z|^2)(1-|w|^2) / |1 - herm(w,z)|^2.
double bergman_metric(const CVec& z, const CVec& w);

// Mobius involution phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - herm(a, z)),
// s_a = sqrt(1-|a|^2); phi_a(0) = a, phi_a(a) = 0.
CVec mobius(const CVec& a, const CVec& z);

// Orthogonal projection of w onto the complex line through z (z != 0).
CVec slice_project(const CVec& z, const CVec& w);

// Tent over w: z belongs to T(w) iff |1 - herm(radial projection of w, z)|
// <= 1 - |w|; T(0) is the whole ball.
bool tent_membership(const CVec& z, const CVec& w);

// Haar-distributed unitary via QR of a complex Ginibre matrix with the
// phases of R's diagonal absorbed (deterministic per Rng state).
CMat haar_unitary(int n, Rng& rng);

// Distance between the circle orbits {e^{is} r u} and {e^{it} r v} for unit
// direction vectors u, v: min over phases of the Bergman distance at radius r.
double projective_circle_metric(const CVec& u, const CVec& v, double r);

}  // namespace carleson
