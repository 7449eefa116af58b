#include "eon/rng.hpp"

#include "eon/errors.hpp"

namespace eon {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : state_(splitmix64(seed)) {
  if (state_ == 0) {
    state_ = 0x9E3779B97F4A7C15ULL;
  }
}

std::uint64_t Rng::next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1DULL;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) {
    throw ContractViolation("Rng::uniform: bound must be nonzero");
  }
  // Values below `threshold` would over-represent the low residues.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) {
      return r % bound;
    }
  }
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) {
    throw ContractViolation("Rng::uniform_int: empty range");
  }
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) {
    return static_cast<std::int64_t>(next());
  }
  return lo + static_cast<std::int64_t>(uniform(span));
}

double Rng::uniform_real() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

} // namespace eon
