#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "cartanv/jet.hpp"

namespace cartanv {

/// Seeded generator with distributions defined here rather than by the
/// standard library, whose distribution algorithms are implementation
/// defined. Streams are therefore identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by Box-Muller (one value per call).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Random polynomial of degree <= 2 in the 2n coordinates, expanded at the
/// base point of `coords`. Jets capture its derivatives exactly.
inline Jet random_polynomial(std::span<const Jet> coords, Rng& rng, double scale = 1.0) {
  Jet out = constant_like(coords[0], rng.uniform(-scale, scale));
  const std::size_t m = coords.size();
  for (std::size_t v = 0; v < m; ++v) {
    out += rng.uniform(-scale, scale) * coords[v];
    for (std::size_t w = v; w < m; ++w) out += (0.3 * rng.uniform(-scale, scale)) * coords[v] * coords[w];
  }
  return out;
}

}  // namespace cartanv
