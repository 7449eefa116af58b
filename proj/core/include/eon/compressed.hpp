#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace eon {

class Rng;

/// Largest filter count a 4-bit compressed element can name (0 is silent).
inline constexpr std::uint8_t kMaxFilters = 15;

/// D x D sequence of filter indices, row-major. Element 0 means no active
/// filter at that pixel; v in [1, F] names filter v. Spike vectors and weight
/// vectors share this representation.
class CompressedVector {
public:
  CompressedVector() = default;
  /// All-silent vector.
  CompressedVector(std::size_t side, std::uint8_t filters);
  CompressedVector(std::size_t side, std::uint8_t filters, std::vector<std::uint8_t> elems);

  /// Inverse of packed(): two elements per byte, even pixel in the low nibble.
  static CompressedVector from_packed(std::size_t side, std::uint8_t filters,
                                      std::span<const std::uint8_t> bytes);

  std::size_t side() const noexcept { return side_; }
  std::size_t size() const noexcept { return elems_.size(); }
  std::uint8_t filters() const noexcept { return filters_; }

  std::uint8_t operator[](std::size_t i) const noexcept { return elems_[i]; }
  std::span<const std::uint8_t> elems() const noexcept { return elems_; }

  void set(std::size_t i, std::uint8_t v);

  /// Number of nonzero elements.
  std::size_t active_count() const noexcept;

  std::vector<std::uint8_t> packed() const;
  static std::size_t packed_size(std::size_t pixels) noexcept { return (pixels + 1) / 2; }

  friend bool operator==(const CompressedVector&, const CompressedVector&) = default;

private:
  std::size_t side_ = 0;
  std::uint8_t filters_ = 0;
  std::vector<std::uint8_t> elems_;
};

/// A neuron's binary synapses in compressed form with exactly `active()`
/// nonzero entries. One slot per pixel, so at most one filter is connected
/// at each location.
class WeightVector {
public:
  WeightVector() = default;
  /// Throws ContractViolation unless `v` has exactly `active` nonzero entries.
  WeightVector(CompressedVector v, std::size_t active);

  const CompressedVector& vector() const noexcept { return v_; }
  std::size_t active() const noexcept { return active_; }
  std::size_t side() const noexcept { return v_.side(); }
  std::size_t size() const noexcept { return v_.size(); }
  std::uint8_t filters() const noexcept { return v_.filters(); }
  std::uint8_t operator[](std::size_t i) const noexcept { return v_[i]; }

  /// Re-counts the nonzero entries; true when the W invariant holds.
  bool invariant_holds() const noexcept { return v_.active_count() == active_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

private:
  CompressedVector v_;
  std::size_t active_ = 0;
};

/// One-hot expansion of a compressed vector: pixels x F bits, bit
/// (i * F + f - 1) set iff elems[i] == f. Used by the popcount kernels.
class ExpandedVector {
public:
  ExpandedVector() = default;
  ExpandedVector(std::size_t pixels, std::uint8_t filters);

  static std::size_t word_count(std::size_t pixels, std::uint8_t filters) noexcept {
    return (pixels * filters + 63) / 64;
  }

  std::size_t pixels() const noexcept { return pixels_; }
  std::uint8_t filters() const noexcept { return filters_; }

  /// f is zero-based here: filter index v maps to f = v - 1.
  bool test(std::size_t pixel, std::size_t f) const noexcept;
  void set(std::size_t pixel, std::size_t f) noexcept;
  void clear() noexcept;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

private:
  std::size_t pixels_ = 0;
  std::uint8_t filters_ = 0;
  std::vector<std::uint64_t> words_;
};

ExpandedVector expand(const CompressedVector& v);
/// Writes the one-hot expansion of v into out (word_count(v.size(), v.filters()) words).
void expand_into(const CompressedVector& v, std::span<std::uint64_t> out);
/// Inverse of expand(). Throws ContractViolation if a pixel has more than one bit set.
CompressedVector collapse(const ExpandedVector& bits, std::size_t side);

/// popcount(a & b) over equal-length word spans.
std::size_t and_popcount(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) noexcept;

/// Membrane potential: |{i : w(i) != 0 and w(i) == s(i)}|.
std::size_t match_count(const CompressedVector& s, const WeightVector& w);

/// Pixels holding a spike where the neuron has no active weight (w(i) == 0),
/// ascending. Pixels where w holds a different filter are not included: a
/// weight cannot be switched on there without a second filter at the pixel.
std::vector<std::size_t> ineffective_spikes(const CompressedVector& s, const WeightVector& w);

/// Active weights that do not match the input (w(i) != 0 and w(i) != s(i)), ascending.
std::vector<std::size_t> ineffective_weights(const CompressedVector& s, const WeightVector& w);

/// W distinct pixels chosen uniformly, each given a uniform filter in [1, F].
WeightVector random_weights(std::size_t side, std::uint8_t filters, std::size_t active, Rng& rng);

} // namespace eon
