#pragma once

#include <cstdint>
#include <random>

namespace nehari {

/// splitmix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Stream identifiers for the per-component random streams.
enum class Stream : std::uint64_t {
  Sobolev = 1,
  SobolevPair = 2,
  SolverPlus = 3,
  SolverMinus = 4,
  Probe = 5,
  Scalar = 6,
  Project = 7,
};

/// Seeded generator with a platform-independent uniform mapping.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  Rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0)
      : engine_(splitmix64(splitmix64(seed ^ (static_cast<std::uint64_t>(stream) << 48)) + index)) {}

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nehari
