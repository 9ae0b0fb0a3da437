#pragma once
// Deterministic random sources. std::mt19937_64 is bit-stable across
// implementations, but the std <random> distributions are not, so every
// distribution used here is hand-rolled from raw 64-bit draws. All sampling in
// the library must go through this header so that a given seed reproduces the
// same stream on any toolchain.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace carleson {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // Uniform in [0,1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // i in [0, n)
  std::uint64_t index(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64 and we
    // only need determinism, not perfect equidistribution.
    return gen_() % n;
  }

  // Standard normal via Box-Muller (deterministic; uses two uniforms).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // Guard against log(0).
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace carleson
