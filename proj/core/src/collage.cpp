#include "eon/collage.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>

#include <json.hpp>

#include "eon/costmodel.hpp"
#include "eon/errors.hpp"
#include "eon/rng.hpp"

namespace eon {

std::size_t CollageFrame::face_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(manifest.begin(), manifest.end(), [](const Tile& t) { return t.is_face; }));
}

namespace {

void paste(Image& canvas, const Image& tile, std::size_t x, std::size_t y) {
  for (std::size_t r = 0; r < tile.height; ++r) {
    std::copy_n(tile.pixels.begin() + static_cast<std::ptrdiff_t>(r * tile.width), tile.width,
                canvas.pixels.begin() + static_cast<std::ptrdiff_t>((y + r) * canvas.width + x));
  }
}

void check_tiles(std::span<const Image> pool, std::size_t side, const char* what) {
  for (const auto& im : pool) {
    if (im.width != side || im.height != side) {
      throw DimensionMismatch(std::string(what) + " tiles must be " + std::to_string(side) + "x" +
                              std::to_string(side));
    }
  }
}

} // namespace

CollageFrame build_collage(std::span<const Image> faces, std::span<const Image> nonfaces,
                           const CollageSpec& spec, Rng& rng) {
  const std::size_t side = spec.tile_side;
  if (side == 0) {
    throw GeometryError("tile side must be positive");
  }
  check_tiles(faces, side, "face");
  check_tiles(nonfaces, side, "non-face");
  const std::size_t grid_rows = spec.height / side;
  const std::size_t grid_cols = spec.width / side;
  const std::size_t cells = grid_rows * grid_cols;
  if (spec.faces > cells) {
    throw PlacementError("cannot place " + std::to_string(spec.faces) + " faces on " +
                         std::to_string(cells) + " grid cells");
  }
  if (spec.faces > 0 && faces.empty()) {
    throw PlacementError("no face tiles supplied");
  }

  CollageFrame frame;
  frame.canvas = Image(spec.width, spec.height, spec.background);
  frame.tile_side = side;

  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < spec.faces; ++i) {
    std::swap(order[i], order[i + rng.uniform(cells - i)]);
  }
  // Face cells first, then the free cells in grid order.
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(spec.faces), order.end());
  for (std::size_t i = 0; i < cells; ++i) {
    const std::size_t cell = order[i];
    const bool face = i < spec.faces;
    Tile t{(cell % grid_cols) * side, (cell / grid_cols) * side, face, 0};
    if (face) {
      t.source = rng.uniform(faces.size());
      paste(frame.canvas, faces[t.source], t.x, t.y);
    } else {
      if (nonfaces.empty() || rng.uniform_real() >= spec.nonface_fill) {
        continue;
      }
      t.source = rng.uniform(nonfaces.size());
      paste(frame.canvas, nonfaces[t.source], t.x, t.y);
    }
    frame.manifest.push_back(t);
  }
  std::sort(frame.manifest.begin(), frame.manifest.end(),
            [](const Tile& a, const Tile& b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
  return frame;
}

void write_manifest(const std::filesystem::path& path, const CollageFrame& frame) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  for (const auto& t : frame.manifest) {
    nlohmann::ordered_json j;
    j["x"] = t.x;
    j["y"] = t.y;
    j["is_face"] = t.is_face;
    out << j.dump() << '\n';
  }
}

std::vector<Tile> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<Tile> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("x").get<std::size_t>(), j.at("y").get<std::size_t>(), j.at("is_face").get<bool>(), 0});
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ": bad manifest line: " + e.what());
    }
  }
  return out;
}

WindowGrid::WindowGrid(std::size_t frame_height, std::size_t frame_width, std::size_t patch_side,
                       std::size_t stride)
    : side_(patch_side), stride_(stride) {
  const auto wc = window_count({frame_height, frame_width, patch_side, stride});
  rows_ = wc.rows;
  cols_ = wc.cols;
}

WindowGrid sliding_windows(const Image& frame, std::size_t patch_side, std::size_t stride) {
  return WindowGrid(frame.height, frame.width, patch_side, stride);
}

RecallResult recall_on_manifest(std::span<const WindowOrigin> detections, std::span<const Tile> manifest,
                                std::size_t tile_side) {
  std::vector<WindowOrigin> sorted(detections.begin(), detections.end());
  const auto before = [](const WindowOrigin& a, const WindowOrigin& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  };
  std::sort(sorted.begin(), sorted.end(), before);
  RecallResult r;
  for (const auto& t : manifest) {
    if (!t.is_face) {
      continue;
    }
    ++r.total;
    for (std::size_t y = t.y; y < t.y + tile_side; ++y) {
      const auto it = std::lower_bound(sorted.begin(), sorted.end(), WindowOrigin{t.x, y}, before);
      if (it != sorted.end() && it->y == y && it->x < t.x + tile_side) {
        ++r.found;
        break;
      }
    }
  }
  return r;
}

} // namespace eon
