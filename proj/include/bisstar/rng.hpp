#pragma once

#include <cstdint>

namespace bisstar {

/// splitmix64 generator.  Small, fast, and fully reproducible across
/// platforms, which std::uniform_real_distribution is not.  Streams derived
/// from (seed, stream index) are independent for our purposes and make
/// Monte Carlo results bit-identical regardless of worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(scramble(seed)) {}

  static Rng stream(std::uint64_t seed, std::uint64_t stream_index) {
    return Rng(scramble(seed) ^ scramble(stream_index ^ 0xD1B54A32D192ED03ULL));
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in the open interval (0, 1); never exactly 0 or 1 so that
  /// quantile transforms of unbounded families stay finite.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

 private:
  static std::uint64_t scramble(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xFF51AFD7ED558CCDULL;
    x ^= x >> 33;
    x *= 0xC4CEB9FE1A85EC53ULL;
    x ^= x >> 33;
    return x;
  }

  std::uint64_t state_;
};

}  // namespace bisstar
