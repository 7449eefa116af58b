#pragma once

#include <cstdint>

namespace eon {

/// Seeded 64-bit xorshift* generator.
///
/// Every stochastic step in the library (weight initialisation, scan start
/// addresses, swap positions, collage placement) draws from an Rng so that a
/// run is fully replayable from its seed. The seed is whitened with one
/// splitmix64 step, so seed 0 is legal.
///
/// Step: x ^= x >> 12; x ^= x << 25; x ^= x >> 27; out = x * 0x2545F4914F6CDD1D.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0x5EED);

  std::uint64_t next();

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  /// bound must be nonzero.
  std::uint64_t uniform(std::uint64_t bound);

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform_real();

  std::uint64_t state() const noexcept { return state_; }

private:
  std::uint64_t state_;
};

/// splitmix64 finaliser, also used to derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

} // namespace eon
