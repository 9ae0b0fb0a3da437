#include "carleson/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace carleson {

double radical_inverse(std::uint64_t index, int base) {
  double inv_base = 1.0 / base;
  double scale = inv_base;
  double value = 0.0;
  while (index > 0) {
    value += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv_base;
  }
  return value;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = mid - half * x;
    nodes[n - 1 - i] = mid + half * x;
    weights[i] = half * w;
    weights[n - 1 - i] = half * w;
  }
}

namespace {
constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                           31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
}

std::vector<std::vector<double>> halton_cube(int d, int count,
                                             std::uint64_t seed) {
  if (d < 1 || d > static_cast<int>(std::size(kPrimes)))
    throw std::invalid_argument("halton_cube: dimension out of range");
  if (count < 0) throw std::invalid_argument("halton_cube: count >= 0");
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  for (int k = 0; k < count; ++k) {
    std::uint64_t index = seed + 1 + static_cast<std::uint64_t>(k);
    std::vector<double> p(d);
    for (int j = 0; j < d; ++j) p[j] = radical_inverse(index, kPrimes[j]);
    pts.push_back(std::move(p));
  }
  return pts;
}

std::vector<CVec> halton_ball(int n, int budget, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("halton_ball: n >= 1");
  auto cube = halton_cube(2 * n, budget, seed);
  std::vector<CVec> pts;
  pts.reserve(cube.size() / 2);
  for (const auto& u : cube) {
    CVec z(n);
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      double re = 2.0 * u[2 * j] - 1.0;
      double im = 2.0 * u[2 * j + 1] - 1.0;
      z[j] = std::complex<double>(re, im);
      norm2 += re * re + im * im;
    }
    if (norm2 < 1.0) pts.push_back(std::move(z));
  }
  return pts;
}

std::vector<CVec> halton_sphere(int n, int count, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("halton_sphere: n >= 1");
  auto cube = halton_cube(2 * n, count, seed);
  std::vector<CVec> pts;
  pts.reserve(cube.size());
  for (const auto& u : cube) {
    CVec z(n);
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      double u1 = std::max(u[2 * j], 0x1.0p-53);
      double u2 = u[2 * j + 1];
      double rad = std::sqrt(-2.0 * std::log(u1));
      double re = rad * std::cos(2.0 * std::numbers::pi * u2);
      double im = rad * std::sin(2.0 * std::numbers::pi * u2);
      z[j] = std::complex<double>(re, im);
      norm2 += re * re + im * im;
    }
    if (norm2 == 0.0) {
      z[0] = 1.0;
      norm2 = 1.0;
    }
    z /= std::sqrt(norm2);
    pts.push_back(std::move(z));
  }
  return pts;
}

}  // namespace carleson
