#include "eon/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "eon/errors.hpp"

namespace eon {

Image::Image(std::size_t w, std::size_t h, std::vector<std::uint8_t> px)
    : width(w), height(h), pixels(std::move(px)) {
  if (pixels.size() != width * height) {
    throw DimensionMismatch("image buffer holds " + std::to_string(pixels.size()) +
                            " pixels, expected " + std::to_string(width * height));
  }
}

Image Image::crop(std::size_t x, std::size_t y, std::size_t w, std::size_t h) const {
  if (x + w > width || y + h > height) {
    throw GeometryError("crop outside image bounds");
  }
  Image out(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    std::copy_n(pixels.begin() + static_cast<std::ptrdiff_t>((y + r) * width + x), w,
                out.pixels.begin() + static_cast<std::ptrdiff_t>(r * w));
  }
  return out;
}

Image downscale_2x2(const Image& img) {
  if (img.width % 2 != 0 || img.height % 2 != 0) {
    throw DimensionMismatch("downscale_2x2 needs even dimensions, got " + std::to_string(img.width) +
                            "x" + std::to_string(img.height));
  }
  Image out(img.width / 2, img.height / 2);
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      const unsigned sum = img.at(2 * x, 2 * y) + img.at(2 * x + 1, 2 * y) +
                           img.at(2 * x, 2 * y + 1) + img.at(2 * x + 1, 2 * y + 1);
      out.at(x, y) = static_cast<std::uint8_t>((sum + 2) / 4);
    }
  }
  return out;
}

Image resize_area(const Image& img, std::size_t width, std::size_t height) {
  if (img.width == 0 || img.height == 0 || width == 0 || height == 0) {
    throw DimensionMismatch("resize_area: empty image");
  }
  Image out(width, height);
  const double sx = static_cast<double>(img.width) / static_cast<double>(width);
  const double sy = static_cast<double>(img.height) / static_cast<double>(height);
  for (std::size_t y = 0; y < height; ++y) {
    const double y0 = y * sy;
    const double y1 = y0 + sy;
    for (std::size_t x = 0; x < width; ++x) {
      const double x0 = x * sx;
      const double x1 = x0 + sx;
      double acc = 0.0;
      double area = 0.0;
      for (auto iy = static_cast<std::size_t>(y0); iy < img.height && static_cast<double>(iy) < y1; ++iy) {
        const double hy = std::min<double>(iy + 1, y1) - std::max<double>(iy, y0);
        for (auto ix = static_cast<std::size_t>(x0); ix < img.width && static_cast<double>(ix) < x1; ++ix) {
          const double wx = std::min<double>(ix + 1, x1) - std::max<double>(ix, x0);
          acc += hy * wx * img.at(ix, iy);
          area += hy * wx;
        }
      }
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(acc / area + 0.5, 0.0, 255.0));
    }
  }
  return out;
}

namespace {

std::size_t read_header_int(std::istream& in, const std::filesystem::path& path) {
  int c = in.peek();
  while (c != EOF) {
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else {
      break;
    }
    c = in.peek();
  }
  std::size_t v = 0;
  if (!(in >> v)) {
    throw FormatError("malformed PGM header in " + path.string());
  }
  return v;
}

} // namespace

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') {
    throw BadMagic(path.string() + " is not a binary PGM (P5)");
  }
  const auto w = read_header_int(in, path);
  const auto h = read_header_int(in, path);
  const auto maxval = read_header_int(in, path);
  if (maxval == 0 || maxval > 255) {
    throw FormatError(path.string() + ": only 8-bit PGM is supported");
  }
  in.get(); // single whitespace before the raster
  std::vector<std::uint8_t> px(w * h);
  in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (static_cast<std::size_t>(in.gcount()) != px.size()) {
    throw TruncatedPayload(path.string() + ": raster shorter than header claims");
  }
  if (maxval != 255) {
    for (auto& p : px) {
      p = static_cast<std::uint8_t>((p * 255U + maxval / 2) / maxval);
    }
  }
  return Image(w, h, std::move(px));
}

void write_pgm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
}

std::vector<Image> load_pgm_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError(dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Image> out;
  out.reserve(files.size());
  for (const auto& f : files) {
    out.push_back(read_pgm(f));
  }
  return out;
}

} // namespace eon
