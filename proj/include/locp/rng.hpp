#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace locp {

/// Seeded generator with hand-rolled transforms. mt19937_64 is fully pinned
/// by the standard and the transforms below avoid std distributions, so the
/// same seed yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  /// Standard normal via the polar method (first coordinate only).
  double normal() {
    for (;;) {
      const double u = 2.0 * uniform() - 1.0;
      const double v = 2.0 * uniform() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  std::complex<double> cnormal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  /// Uniform integer in [0, n). n must be positive and small.
  int below(int n) { return static_cast<int>(bits() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace locp
