#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "eon/compressed.hpp"
#include "eon/image.hpp"

namespace eon {

/// F zero-sum edge kernels of K_S x K_S integer coefficients plus the firing
/// threshold the lateral-inhibition stage compares against.
class FilterBank {
public:
  FilterBank() = default;
  /// coeffs holds F consecutive row-major kernels. Throws ContractViolation if
  /// a kernel is not zero-sum or the coefficient count is wrong.
  FilterBank(std::uint8_t filters, std::size_t kernel_side, std::vector<std::int32_t> coeffs,
             std::int32_t threshold = 0);

  /// Default bank: F Gaussian-weighted first-difference kernels at 360/F
  /// degree steps, coefficient round(23 * <p, u> * exp(-|p|^2 / 2 sigma^2))
  /// with sigma = 0.16 * K_S. Kernels are antisymmetric and therefore
  /// zero-sum; for F in {4, 8} at K_S = 5 they share one L1 norm.
  static FilterBank oriented_edges(std::uint8_t filters = 8, std::size_t kernel_side = 5,
                                   std::int32_t threshold = 0);

  /// Text format: first line "F K_S", then F blocks of K_S lines of K_S
  /// signed integers. Blank lines and '#' comments are ignored.
  static FilterBank parse(std::istream& in, std::int32_t threshold = 0);
  static FilterBank load(const std::filesystem::path& path, std::int32_t threshold = 0);
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  std::uint8_t filters() const noexcept { return filters_; }
  std::size_t kernel_side() const noexcept { return kernel_side_; }
  std::int32_t threshold() const noexcept { return threshold_; }
  void set_threshold(std::int32_t t) noexcept { threshold_ = t; }

  /// Coefficient of kernel f (zero-based) at row dy, column dx.
  std::int32_t coeff(std::size_t f, std::size_t dy, std::size_t dx) const noexcept {
    return coeffs_[(f * kernel_side_ + dy) * kernel_side_ + dx];
  }
  std::span<const std::int32_t> kernel(std::size_t f) const noexcept {
    return std::span(coeffs_).subspan(f * kernel_side_ * kernel_side_, kernel_side_ * kernel_side_);
  }

  friend bool operator==(const FilterBank&, const FilterBank&) = default;

private:
  std::uint8_t filters_ = 0;
  std::size_t kernel_side_ = 0;
  std::vector<std::int32_t> coeffs_;
  std::int32_t threshold_ = 0;
};

/// F valid-region response maps, each width x height, layout [f][y][x].
struct ResponseMaps {
  std::uint8_t filters = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::int32_t> values;

  std::int32_t at(std::size_t f, std::size_t x, std::size_t y) const noexcept {
    return values[(f * height + y) * width + x];
  }
};

/// Stride-1, no-padding correlation of every kernel with the image.
/// Output maps are (width - K_S + 1) x (height - K_S + 1).
ResponseMaps convolve(const Image& image, const FilterBank& bank);

/// Channel-wise 1-WTA: out[i] = argmax_f response + 1 if the maximum is
/// strictly above threshold, else 0. Ties go to the lowest filter index.
/// Requires square maps.
CompressedVector lateral_inhibit(const ResponseMaps& responses, std::int32_t threshold);

/// Encodes one (D + K_S - 1)^2 patch into a D x D spike vector.
CompressedVector encode(const Image& patch, const FilterBank& bank, std::int32_t threshold);
inline CompressedVector encode(const Image& patch, const FilterBank& bank) {
  return encode(patch, bank, bank.threshold());
}

/// Winner-filter map of a whole frame. Because the encoder is a valid
/// convolution followed by a per-pixel argmax, the spike vector of the patch
/// with origin (x, y) is exactly the D x D window of this map at (x, y).
class SpikeMap {
public:
  SpikeMap() = default;
  SpikeMap(std::size_t width, std::size_t height, std::uint8_t filters, std::vector<std::uint8_t> elems);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::uint8_t filters() const noexcept { return filters_; }
  std::uint8_t at(std::size_t x, std::size_t y) const noexcept { return elems_[y * width_ + x]; }

  CompressedVector window(std::size_t x, std::size_t y, std::size_t side) const;
  /// One-hot expansion of window(x, y, side) written straight into `out`.
  void window_expanded(std::size_t x, std::size_t y, std::size_t side,
                       std::span<std::uint64_t> out) const;

private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::uint8_t filters_ = 0;
  std::vector<std::uint8_t> elems_;
};

SpikeMap encode_frame(const Image& frame, const FilterBank& bank);

} // namespace eon
