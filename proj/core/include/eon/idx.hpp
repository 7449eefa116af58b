#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eon/image.hpp"

namespace eon {

/// Uniformly sized grayscale images with one label each.
struct LabeledImageSet {
  std::string name;
  std::vector<Image> images;
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return images.size(); }
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Reads an IDX image file and its label file (big-endian headers).
/// Throws BadMagic, TruncatedPayload or CountMismatch.
LabeledImageSet load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                         std::size_t limit = 0);

void write_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
               const LabeledImageSet& set);

} // namespace eon
