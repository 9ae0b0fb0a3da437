#pragma once
// Deterministic quadrature helpers: Gauss-Legendre rules on an interval and
// low-discrepancy (Halton) point sets in cubes and complex balls. All outputs
// are pure functions of their arguments so runs with equal seeds agree bit
// for bit across platforms with IEEE doubles.

#include <cstdint>
#include <vector>

#include "carleson/ball.hpp"

namespace carleson {

// Radical-inverse of `index` in the given prime base, in [0, 1).
double radical_inverse(std::uint64_t index, int base);

// Nodes and weights of the n-point Gauss-Legendre rule on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

// Halton points in [0,1]^d, indices seed+1 .. seed+count (skipping index 0).
std::vector<std::vector<double>> halton_cube(int d, int count,
                                             std::uint64_t seed);

// Low-discrepancy points in the open unit ball of C^n: Halton points in
// [-1,1]^{2n} filtered to the ball. `budget` counts generated points, so the
// returned size is roughly budget * vol(B^{2n}) / 4^n.
std::vector<CVec> halton_ball(int n, int budget, std::uint64_t seed);

// Low-discrepancy points on the unit sphere of C^n: Halton points pushed
// through the Gaussian map and normalized. Exactly `count` points.
std::vector<CVec> halton_sphere(int n, int count, std::uint64_t seed);

}  // namespace carleson
