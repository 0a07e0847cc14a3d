#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace matrec {

// Seed derivation uses the splitmix64 finalizer. Substreams are obtained as
//   derive(seed, k) = mix(seed + (k+1) * 0x9e3779b97f4a7c15)
// so a stream for (ensemble index j), (trial t), (restart k), ... depends only
// on the inputs, never on generation order or worker scheduling.

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return derive(derive(seed, a), b);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                               std::uint64_t c) {
  return derive(derive(seed, a, b), c);
}

/// Deterministic random stream. Gaussians come from a Box-Muller transform on
/// mt19937_64 uniforms, so draws are reproducible across platforms and do not
/// depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed ^ 0x6a09e667f3bcc908ULL)) {}

  /// Uniform in (0, 1].
  double uniform() {
    const std::uint64_t u = engine_() >> 11;  // 53 bits
    return (static_cast<double>(u) + 1.0) * 0x1p-53;
  }

  /// Standard normal.
  double gauss() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace matrec
