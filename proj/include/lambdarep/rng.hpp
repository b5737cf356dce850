#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace lambdarep {

/// splitmix64 finalizer; used to derive independent per-episode / per-rollout seeds.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Explicitly seeded generator. Draws are built from raw engine output so
/// sequences do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  int below(int n) {
    auto x = static_cast<int>(uniform() * n);
    return x < n ? x : n - 1;
  }

  /// Index drawn proportionally to nonnegative weights summing to ~1.
  int categorical(std::span<const double> weights) {
    double u = uniform();
    double acc = 0.0;
    int last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = static_cast<int>(i);
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return last_positive;
  }

  double normal() {
    // Box-Muller on our own uniforms.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lambdarep
