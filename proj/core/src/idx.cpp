#include "eon/idx.hpp"

#include <fstream>
#include <iterator>

#include "eon/errors.hpp"

namespace eon {

namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<std::uint8_t>& buf, std::size_t off) {
  return (std::uint32_t{buf[off]} << 24) | (std::uint32_t{buf[off + 1]} << 16) |
         (std::uint32_t{buf[off + 2]} << 8) | std::uint32_t{buf[off + 3]};
}

void put_be32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

} // namespace

LabeledImageSet load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                         std::size_t limit) {
  const auto img = slurp(images);
  const auto lab = slurp(labels);
  if (img.size() < 4) {
    throw TruncatedPayload(images.string() + ": header truncated");
  }
  if (lab.size() < 4) {
    throw TruncatedPayload(labels.string() + ": header truncated");
  }
  if (be32(img, 0) != kIdxImageMagic) {
    throw BadMagic(images.string() + ": not an IDX3 image file");
  }
  if (be32(lab, 0) != kIdxLabelMagic) {
    throw BadMagic(labels.string() + ": not an IDX1 label file");
  }
  if (img.size() < 16) {
    throw TruncatedPayload(images.string() + ": header truncated");
  }
  if (lab.size() < 8) {
    throw TruncatedPayload(labels.string() + ": header truncated");
  }
  const std::size_t count = be32(img, 4);
  const std::size_t rows = be32(img, 8);
  const std::size_t cols = be32(img, 12);
  const std::size_t label_count = be32(lab, 4);
  if (count != label_count) {
    throw CountMismatch("image count " + std::to_string(count) + " != label count " +
                        std::to_string(label_count));
  }
  const std::size_t px = rows * cols;
  if (img.size() - 16 < count * px) {
    throw TruncatedPayload(images.string() + ": pixel payload truncated");
  }
  if (lab.size() - 8 < count) {
    throw TruncatedPayload(labels.string() + ": label payload truncated");
  }
  const std::size_t n = limit ? std::min(limit, count) : count;
  LabeledImageSet out;
  out.name = images.filename().string();
  out.images.reserve(n);
  out.labels.assign(lab.begin() + 8, lab.begin() + 8 + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto first = img.begin() + 16 + static_cast<std::ptrdiff_t>(i * px);
    out.images.emplace_back(cols, rows, std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(px)));
  }
  return out;
}

void write_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
               const LabeledImageSet& set) {
  if (set.images.size() != set.labels.size()) {
    throw CountMismatch("write_idx: image and label counts differ");
  }
  const std::size_t rows = set.images.empty() ? 0 : set.images.front().height;
  const std::size_t cols = set.images.empty() ? 0 : set.images.front().width;
  std::ofstream img(images, std::ios::binary);
  std::ofstream lab(labels, std::ios::binary);
  if (!img || !lab) {
    throw IoError("write_idx: cannot open output files");
  }
  put_be32(img, kIdxImageMagic);
  put_be32(img, static_cast<std::uint32_t>(set.images.size()));
  put_be32(img, static_cast<std::uint32_t>(rows));
  put_be32(img, static_cast<std::uint32_t>(cols));
  for (const auto& im : set.images) {
    if (im.width != cols || im.height != rows) {
      throw DimensionMismatch("write_idx: images must share one size");
    }
    img.write(reinterpret_cast<const char*>(im.pixels.data()), static_cast<std::streamsize>(im.pixels.size()));
  }
  put_be32(lab, kIdxLabelMagic);
  put_be32(lab, static_cast<std::uint32_t>(set.labels.size()));
  lab.write(reinterpret_cast<const char*>(set.labels.data()), static_cast<std::streamsize>(set.labels.size()));
}

} // namespace eon
