#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "eon/image.hpp"

namespace eon {

class Rng;

struct Tile {
  std::size_t x = 0;
  std::size_t y = 0;
  bool is_face = false;
  std::size_t source = 0;  ///< index into the face or non-face pool

  friend bool operator==(const Tile&, const Tile&) = default;
};

struct CollageFrame {
  Image canvas;
  std::size_t tile_side = 32;
  std::vector<Tile> manifest;

  std::size_t face_count() const noexcept;
};

struct CollageSpec {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t faces = 0;
  std::size_t tile_side = 32;
  double nonface_fill = 1.0;     ///< probability that a free grid cell gets a non-face
  std::uint8_t background = 0;
};

/// Places `spec.faces` face tiles on distinct cells of a tile-aligned grid,
/// then fills each remaining cell with a random non-face tile with
/// probability nonface_fill. Tiles never overlap. Throws PlacementError when
/// the grid has fewer cells than requested faces.
CollageFrame build_collage(std::span<const Image> faces, std::span<const Image> nonfaces,
                           const CollageSpec& spec, Rng& rng);

/// Manifest as JSON lines: {"x":..,"y":..,"is_face":..}
void write_manifest(const std::filesystem::path& path, const CollageFrame& frame);
std::vector<Tile> read_manifest(const std::filesystem::path& path);

struct WindowOrigin {
  std::size_t x = 0;
  std::size_t y = 0;
  friend bool operator==(const WindowOrigin&, const WindowOrigin&) = default;
};

/// Row-major grid of valid window origins for a sliding patch.
class WindowGrid {
public:
  WindowGrid(std::size_t frame_height, std::size_t frame_width, std::size_t patch_side, std::size_t stride);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  std::size_t patch_side() const noexcept { return side_; }
  std::size_t stride() const noexcept { return stride_; }

  WindowOrigin operator[](std::size_t k) const noexcept {
    return {(k % cols_) * stride_, (k / cols_) * stride_};
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t side_ = 0;
  std::size_t stride_ = 1;
};

WindowGrid sliding_windows(const Image& frame, std::size_t patch_side, std::size_t stride);

struct RecallResult {
  std::size_t found = 0;
  std::size_t total = 0;
  double recall() const noexcept {
    return total ? static_cast<double>(found) / static_cast<double>(total) : 0.0;
  }
};

/// A face tile counts as found when any detection origin lies inside it.
RecallResult recall_on_manifest(std::span<const WindowOrigin> detections, std::span<const Tile> manifest,
                                std::size_t tile_side = 32);

} // namespace eon
