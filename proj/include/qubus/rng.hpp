#pragma once

// Seeded random streams. Draws are built directly from the 64-bit engine
// output so sequences are identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <random>

namespace qubus {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  /// Independent stream for (seed, index).
  Rng(std::uint64_t seed, std::uint64_t index)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x51ED27ULL))) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Trials up to and including the first success, >= 1.
  std::uint64_t geometric(double p) {
    if (p >= 1.0) return 1;
    const double u = 1.0 - uniform();  // (0, 1]
    return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-p))) + 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qubus
