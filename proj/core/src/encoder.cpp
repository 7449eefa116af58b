#include "eon/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "eon/errors.hpp"

namespace eon {

namespace {

// Gaussian envelope width (0.8 px at K_S = 5) and integer scale. At K_S = 5
// this scale gives all eight 45-degree kernels the same L1 norm (50).
constexpr double kEdgeSigmaPerSide = 0.16;
constexpr double kEdgeScale = 23.0;

} // namespace

FilterBank::FilterBank(std::uint8_t filters, std::size_t kernel_side,
                       std::vector<std::int32_t> coeffs, std::int32_t threshold)
    : filters_(filters), kernel_side_(kernel_side), coeffs_(std::move(coeffs)), threshold_(threshold) {
  if (filters_ == 0 || filters_ > kMaxFilters) {
    throw ContractViolation("filter bank needs 1..15 kernels, got " + std::to_string(filters_));
  }
  if (kernel_side_ == 0) {
    throw ContractViolation("kernel side must be positive");
  }
  const std::size_t per_kernel = kernel_side_ * kernel_side_;
  if (coeffs_.size() != per_kernel * filters_) {
    throw DimensionMismatch("filter bank expects " + std::to_string(per_kernel * filters_) +
                            " coefficients, got " + std::to_string(coeffs_.size()));
  }
  for (std::size_t f = 0; f < filters_; ++f) {
    std::int64_t sum = 0;
    for (const auto c : kernel(f)) {
      sum += c;
    }
    if (sum != 0) {
      throw ContractViolation("kernel " + std::to_string(f) + " is not zero-sum (sum " +
                              std::to_string(sum) + ")");
    }
  }
}

FilterBank FilterBank::oriented_edges(std::uint8_t filters, std::size_t kernel_side,
                                      std::int32_t threshold) {
  if (kernel_side == 0) {
    throw ContractViolation("kernel side must be positive");
  }
  const auto half = static_cast<double>(kernel_side - 1) / 2.0;
  const double sigma = kEdgeSigmaPerSide * static_cast<double>(kernel_side);
  std::vector<std::int32_t> coeffs;
  coeffs.reserve(filters * kernel_side * kernel_side);
  for (std::size_t f = 0; f < filters; ++f) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(f) / filters;
    const double ux = std::cos(angle);
    // Image rows grow downwards; flip so 90 degrees points up.
    const double uy = -std::sin(angle);
    for (std::size_t dy = 0; dy < kernel_side; ++dy) {
      for (std::size_t dx = 0; dx < kernel_side; ++dx) {
        const double x = static_cast<double>(dx) - half;
        const double y = static_cast<double>(dy) - half;
        const double v = kEdgeScale * (x * ux + y * uy) * std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
        // Round half away from zero: keeps the kernel antisymmetric, hence zero-sum.
        coeffs.push_back(static_cast<std::int32_t>(std::copysign(std::floor(std::abs(v) + 0.5), v)));
      }
    }
  }
  return FilterBank(filters, kernel_side, std::move(coeffs), threshold);
}

FilterBank FilterBank::parse(std::istream& in, std::int32_t threshold) {
  std::vector<std::int64_t> numbers;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        numbers.push_back(std::stoll(tok, &used));
        if (used != tok.size()) {
          throw FormatError("filter bank: bad token '" + tok + "'");
        }
      } catch (const std::logic_error&) {
        throw FormatError("filter bank: bad token '" + tok + "'");
      }
    }
  }
  if (numbers.size() < 2) {
    throw FormatError("filter bank: missing 'F K_S' header");
  }
  const auto filters = numbers[0];
  const auto side = numbers[1];
  if (filters <= 0 || filters > kMaxFilters || side <= 0) {
    throw FormatError("filter bank: bad header");
  }
  const auto expected = static_cast<std::size_t>(filters * side * side);
  if (numbers.size() - 2 != expected) {
    throw FormatError("filter bank: expected " + std::to_string(expected) + " coefficients, found " +
                      std::to_string(numbers.size() - 2));
  }
  std::vector<std::int32_t> coeffs(numbers.begin() + 2, numbers.end());
  return FilterBank(static_cast<std::uint8_t>(filters), static_cast<std::size_t>(side),
                    std::move(coeffs), threshold);
}

FilterBank FilterBank::load(const std::filesystem::path& path, std::int32_t threshold) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open filter bank " + path.string());
  }
  return parse(in, threshold);
}

void FilterBank::write(std::ostream& out) const {
  out << static_cast<int>(filters_) << ' ' << kernel_side_ << '\n';
  for (std::size_t f = 0; f < filters_; ++f) {
    out << '\n';
    for (std::size_t dy = 0; dy < kernel_side_; ++dy) {
      for (std::size_t dx = 0; dx < kernel_side_; ++dx) {
        out << (dx ? " " : "") << coeff(f, dy, dx);
      }
      out << '\n';
    }
  }
}

void FilterBank::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write filter bank " + path.string());
  }
  write(out);
}

ResponseMaps convolve(const Image& image, const FilterBank& bank) {
  const std::size_t k = bank.kernel_side();
  if (image.width < k || image.height < k || image.pixels.size() != image.width * image.height) {
    throw DimensionMismatch("image " + std::to_string(image.width) + "x" +
                            std::to_string(image.height) + " is smaller than the " +
                            std::to_string(k) + "x" + std::to_string(k) + " kernels");
  }
  ResponseMaps out;
  out.filters = bank.filters();
  out.width = image.width - k + 1;
  out.height = image.height - k + 1;
  out.values.assign(out.filters * out.width * out.height, 0);
  for (std::size_t f = 0; f < bank.filters(); ++f) {
    std::int32_t* dst = out.values.data() + f * out.width * out.height;
    for (std::size_t dy = 0; dy < k; ++dy) {
      for (std::size_t dx = 0; dx < k; ++dx) {
        const std::int32_t c = bank.coeff(f, dy, dx);
        if (c == 0) {
          continue;
        }
        for (std::size_t y = 0; y < out.height; ++y) {
          const std::uint8_t* src = image.pixels.data() + (y + dy) * image.width + dx;
          std::int32_t* row = dst + y * out.width;
          for (std::size_t x = 0; x < out.width; ++x) {
            row[x] += c * static_cast<std::int32_t>(src[x]);
          }
        }
      }
    }
  }
  return out;
}

namespace {

std::vector<std::uint8_t> winners(const ResponseMaps& r, std::int32_t threshold) {
  const std::size_t plane = r.width * r.height;
  std::vector<std::uint8_t> out(plane, 0);
  for (std::size_t i = 0; i < plane; ++i) {
    std::int32_t best = r.values[i];
    std::uint8_t arg = 0;
    for (std::size_t f = 1; f < r.filters; ++f) {
      const std::int32_t v = r.values[f * plane + i];
      if (v > best) {
        best = v;
        arg = static_cast<std::uint8_t>(f);
      }
    }
    out[i] = best > threshold ? static_cast<std::uint8_t>(arg + 1) : 0;
  }
  return out;
}

} // namespace

CompressedVector lateral_inhibit(const ResponseMaps& responses, std::int32_t threshold) {
  if (responses.width != responses.height) {
    throw DimensionMismatch("lateral_inhibit expects square response maps");
  }
  if (responses.values.size() != responses.filters * responses.width * responses.height) {
    throw DimensionMismatch("lateral_inhibit: response buffer has wrong size");
  }
  return CompressedVector(responses.width, responses.filters, winners(responses, threshold));
}

CompressedVector encode(const Image& patch, const FilterBank& bank, std::int32_t threshold) {
  if (patch.width != patch.height) {
    throw DimensionMismatch("patch must be square, got " + std::to_string(patch.width) + "x" +
                            std::to_string(patch.height));
  }
  return lateral_inhibit(convolve(patch, bank), threshold);
}

SpikeMap::SpikeMap(std::size_t width, std::size_t height, std::uint8_t filters,
                   std::vector<std::uint8_t> elems)
    : width_(width), height_(height), filters_(filters), elems_(std::move(elems)) {
  if (elems_.size() != width_ * height_) {
    throw DimensionMismatch("spike map buffer has wrong size");
  }
}

CompressedVector SpikeMap::window(std::size_t x, std::size_t y, std::size_t side) const {
  if (x + side > width_ || y + side > height_) {
    throw GeometryError("spike map window out of bounds");
  }
  std::vector<std::uint8_t> elems(side * side);
  for (std::size_t r = 0; r < side; ++r) {
    std::copy_n(elems_.begin() + static_cast<std::ptrdiff_t>((y + r) * width_ + x), side,
                elems.begin() + static_cast<std::ptrdiff_t>(r * side));
  }
  return CompressedVector(side, filters_, std::move(elems));
}

void SpikeMap::window_expanded(std::size_t x, std::size_t y, std::size_t side,
                               std::span<std::uint64_t> out) const {
  if (x + side > width_ || y + side > height_) {
    throw GeometryError("spike map window out of bounds");
  }
  if (out.size() != ExpandedVector::word_count(side * side, filters_)) {
    throw DimensionMismatch("window_expanded: output span has wrong word count");
  }
  std::fill(out.begin(), out.end(), 0);
  const std::size_t f = filters_;
  for (std::size_t r = 0; r < side; ++r) {
    const std::uint8_t* row = elems_.data() + (y + r) * width_ + x;
    const std::size_t base = r * side;
    for (std::size_t c = 0; c < side; ++c) {
      if (const auto e = row[c]; e != 0) {
        const std::size_t bit = (base + c) * f + (e - 1);
        out[bit / 64] |= std::uint64_t{1} << (bit % 64);
      }
    }
  }
}

SpikeMap encode_frame(const Image& frame, const FilterBank& bank) {
  const auto maps = convolve(frame, bank);
  return SpikeMap(maps.width, maps.height, maps.filters, winners(maps, bank.threshold()));
}

} // namespace eon
