#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace eon {

/// 8-bit grayscale raster, row-major.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(std::size_t w, std::size_t h, std::uint8_t fill = 0) : width(w), height(h), pixels(w * h, fill) {}
  Image(std::size_t w, std::size_t h, std::vector<std::uint8_t> px);

  std::uint8_t at(std::size_t x, std::size_t y) const noexcept { return pixels[y * width + x]; }
  std::uint8_t& at(std::size_t x, std::size_t y) noexcept { return pixels[y * width + x]; }

  /// Copy of the side x side square whose top-left corner is (x, y).
  Image crop(std::size_t x, std::size_t y, std::size_t w, std::size_t h) const;

  friend bool operator==(const Image&, const Image&) = default;
};

/// Halves both dimensions; each output pixel is the mean of its 2x2 block,
/// rounded half up. Throws DimensionMismatch on odd dimensions.
Image downscale_2x2(const Image& img);

/// Area-mean resampling to an arbitrary size (used to bring face crops to 32x32).
Image resize_area(const Image& img, std::size_t width, std::size_t height);

/// Binary PGM (P5, maxval <= 255).
Image read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Image& img);

/// Every *.pgm file in `dir`, sorted by filename.
std::vector<Image> load_pgm_dir(const std::filesystem::path& dir);

} // namespace eon
