#include "eon/compressed.hpp"

#include <bit>
#include <numeric>
#include <string>

#include "eon/errors.hpp"
#include "eon/rng.hpp"

namespace eon {

namespace {

void check_filters(std::uint8_t filters) {
  if (filters == 0 || filters > kMaxFilters) {
    throw ContractViolation("filter count must be in [1, 15], got " + std::to_string(filters));
  }
}

void check_compatible(const CompressedVector& s, const WeightVector& w) {
  if (s.size() != w.size() || s.filters() != w.filters()) {
    throw DimensionMismatch("spike/weight vectors disagree: " + std::to_string(s.size()) + "x" +
                            std::to_string(s.filters()) + " vs " + std::to_string(w.size()) +
                            "x" + std::to_string(w.filters()));
  }
}

} // namespace

CompressedVector::CompressedVector(std::size_t side, std::uint8_t filters)
    : side_(side), filters_(filters), elems_(side * side, 0) {
  check_filters(filters);
}

CompressedVector::CompressedVector(std::size_t side, std::uint8_t filters,
                                   std::vector<std::uint8_t> elems)
    : side_(side), filters_(filters), elems_(std::move(elems)) {
  check_filters(filters);
  if (elems_.size() != side * side) {
    throw DimensionMismatch("compressed vector needs " + std::to_string(side * side) +
                            " elements, got " + std::to_string(elems_.size()));
  }
  for (const auto v : elems_) {
    if (v > filters_) {
      throw ContractViolation("element " + std::to_string(v) + " exceeds filter count " +
                              std::to_string(filters_));
    }
  }
}

CompressedVector CompressedVector::from_packed(std::size_t side, std::uint8_t filters,
                                               std::span<const std::uint8_t> bytes) {
  const std::size_t pixels = side * side;
  if (bytes.size() != packed_size(pixels)) {
    throw DimensionMismatch("packed vector has wrong byte count");
  }
  std::vector<std::uint8_t> elems(pixels);
  for (std::size_t i = 0; i < pixels; ++i) {
    const std::uint8_t byte = bytes[i / 2];
    elems[i] = (i % 2 == 0) ? (byte & 0x0F) : (byte >> 4);
  }
  return CompressedVector(side, filters, std::move(elems));
}

void CompressedVector::set(std::size_t i, std::uint8_t v) {
  if (i >= elems_.size() || v > filters_) {
    throw ContractViolation("CompressedVector::set out of range");
  }
  elems_[i] = v;
}

std::size_t CompressedVector::active_count() const noexcept {
  std::size_t n = 0;
  for (const auto v : elems_) {
    n += (v != 0);
  }
  return n;
}

std::vector<std::uint8_t> CompressedVector::packed() const {
  std::vector<std::uint8_t> out(packed_size(elems_.size()), 0);
  for (std::size_t i = 0; i < elems_.size(); ++i) {
    out[i / 2] |= static_cast<std::uint8_t>(i % 2 == 0 ? elems_[i] : elems_[i] << 4);
  }
  return out;
}

WeightVector::WeightVector(CompressedVector v, std::size_t active)
    : v_(std::move(v)), active_(active) {
  if (v_.active_count() != active_) {
    throw ContractViolation("weight vector must have exactly " + std::to_string(active_) +
                            " active synapses, has " + std::to_string(v_.active_count()));
  }
}

ExpandedVector::ExpandedVector(std::size_t pixels, std::uint8_t filters)
    : pixels_(pixels), filters_(filters), words_(word_count(pixels, filters), 0) {}

bool ExpandedVector::test(std::size_t pixel, std::size_t f) const noexcept {
  const std::size_t bit = pixel * filters_ + f;
  return (words_[bit / 64] >> (bit % 64)) & 1U;
}

void ExpandedVector::set(std::size_t pixel, std::size_t f) noexcept {
  const std::size_t bit = pixel * filters_ + f;
  words_[bit / 64] |= std::uint64_t{1} << (bit % 64);
}

void ExpandedVector::clear() noexcept {
  std::fill(words_.begin(), words_.end(), 0);
}

void expand_into(const CompressedVector& v, std::span<std::uint64_t> out) {
  if (out.size() != ExpandedVector::word_count(v.size(), v.filters())) {
    throw DimensionMismatch("expand_into: output span has wrong word count");
  }
  std::fill(out.begin(), out.end(), 0);
  const std::size_t f = v.filters();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (const auto e = v[i]; e != 0) {
      const std::size_t bit = i * f + (e - 1);
      out[bit / 64] |= std::uint64_t{1} << (bit % 64);
    }
  }
}

ExpandedVector expand(const CompressedVector& v) {
  ExpandedVector out(v.size(), v.filters());
  expand_into(v, out.words());
  return out;
}

CompressedVector collapse(const ExpandedVector& bits, std::size_t side) {
  if (side * side != bits.pixels()) {
    throw DimensionMismatch("collapse: side does not match pixel count");
  }
  std::vector<std::uint8_t> elems(bits.pixels(), 0);
  for (std::size_t i = 0; i < bits.pixels(); ++i) {
    for (std::size_t f = 0; f < bits.filters(); ++f) {
      if (bits.test(i, f)) {
        if (elems[i] != 0) {
          throw ContractViolation("collapse: pixel " + std::to_string(i) +
                                  " has more than one active filter");
        }
        elems[i] = static_cast<std::uint8_t>(f + 1);
      }
    }
  }
  return CompressedVector(side, bits.filters(), std::move(elems));
}

std::size_t and_popcount(std::span<const std::uint64_t> a,
                         std::span<const std::uint64_t> b) noexcept {
  std::size_t n = 0;
  const std::size_t len = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < len; ++i) {
    n += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  }
  return n;
}

std::size_t match_count(const CompressedVector& s, const WeightVector& w) {
  check_compatible(s, w);
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    n += (w[i] != 0 && w[i] == s[i]);
  }
  return n;
}

std::vector<std::size_t> ineffective_spikes(const CompressedVector& s, const WeightVector& w) {
  check_compatible(s, w);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != 0 && w[i] == 0) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<std::size_t> ineffective_weights(const CompressedVector& s, const WeightVector& w) {
  check_compatible(s, w);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (w[i] != 0 && w[i] != s[i]) {
      out.push_back(i);
    }
  }
  return out;
}

WeightVector random_weights(std::size_t side, std::uint8_t filters, std::size_t active, Rng& rng) {
  const std::size_t pixels = side * side;
  if (active > pixels) {
    throw ContractViolation("W = " + std::to_string(active) + " exceeds D^2 = " +
                            std::to_string(pixels));
  }
  check_filters(filters);
  std::vector<std::size_t> order(pixels);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `active` slots are a uniform subset.
  for (std::size_t i = 0; i < active; ++i) {
    const std::size_t j = i + rng.uniform(pixels - i);
    std::swap(order[i], order[j]);
  }
  std::vector<std::uint8_t> elems(pixels, 0);
  for (std::size_t i = 0; i < active; ++i) {
    elems[order[i]] = static_cast<std::uint8_t>(1 + rng.uniform(filters));
  }
  return WeightVector(CompressedVector(side, filters, std::move(elems)), active);
}

} // namespace eon
