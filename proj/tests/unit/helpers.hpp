#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "eon/compressed.hpp"

namespace eon::test {

/// Square compressed vector from a row-major element list.
inline CompressedVector cv(std::initializer_list<int> elems, std::uint8_t filters) {
  const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(elems.size()))));
  std::vector<std::uint8_t> v;
  for (const int e : elems) {
    v.push_back(static_cast<std::uint8_t>(e));
  }
  return CompressedVector(side, filters, std::move(v));
}

inline WeightVector wv(std::initializer_list<int> elems, std::uint8_t filters) {
  auto v = cv(elems, filters);
  const auto active = v.active_count();
  return WeightVector(std::move(v), active);
}

/// Independent generator for test data so the library Rng is never its own oracle.
class TestRng {
public:
  explicit TestRng(std::uint64_t seed) : s_(seed * 6364136223846793005ull + 1442695040888963407ull) {}
  std::uint64_t next() {
    s_ = s_ * 6364136223846793005ull + 1442695040888963407ull;
    std::uint64_t x = s_;
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    return x;
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

private:
  std::uint64_t s_;
};

inline CompressedVector random_spikes(std::size_t side, std::uint8_t filters, double density, TestRng& rng) {
  std::vector<std::uint8_t> v(side * side, 0);
  for (auto& e : v) {
    if (static_cast<double>(rng.below(1000)) < density * 1000.0) {
      e = static_cast<std::uint8_t>(1 + rng.below(filters));
    }
  }
  return CompressedVector(side, filters, std::move(v));
}

} // namespace eon::test
