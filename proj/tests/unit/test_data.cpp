#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "eon/collage.hpp"
#include "eon/errors.hpp"
#include "eon/idx.hpp"
#include "eon/image.hpp"
#include "eon/rng.hpp"
#include "helpers.hpp"

using namespace eon;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "eon_unit_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

LabeledImageSet synthetic_set(std::size_t n, std::size_t w, std::size_t h, std::uint64_t seed) {
  test::TestRng rng(seed);
  LabeledImageSet s;
  s.name = "synthetic";
  for (std::size_t i = 0; i < n; ++i) {
    Image img(w, h);
    for (auto& p : img.pixels) {
      p = static_cast<std::uint8_t>(rng.below(256));
    }
    s.images.push_back(img);
    s.labels.push_back(static_cast<std::uint8_t>(rng.below(10)));
  }
  return s;
}

std::vector<Image> tiles(std::size_t n, std::uint8_t base) {
  std::vector<Image> out;
  for (std::size_t i = 0; i < n; ++i) {
    Image t(32, 32, static_cast<std::uint8_t>(base + i));
    t.at(0, 0) = 255;
    out.push_back(t);
  }
  return out;
}

} // namespace

TEST(Idx, RoundTripIsIdentity) {
  const auto set = synthetic_set(37, 28, 28, 1);
  const auto ip = scratch("rt-images"), lp = scratch("rt-labels");
  write_idx(ip, lp, set);
  const auto back = load_idx(ip, lp);
  EXPECT_EQ(back.images, set.images);
  EXPECT_EQ(back.labels, set.labels);
  EXPECT_EQ(load_idx(ip, lp, 5).size(), 5u);
}

TEST(Idx, HeaderIsBigEndian) {
  const auto set = synthetic_set(2, 3, 4, 2);
  const auto ip = scratch("be-images"), lp = scratch("be-labels");
  write_idx(ip, lp, set);
  const auto bytes = read_bytes(ip);
  const std::vector<std::uint8_t> header{0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 4, 0, 0, 0, 3};
  ASSERT_GE(bytes.size(), 16u);
  EXPECT_TRUE(std::equal(header.begin(), header.end(), bytes.begin()));
}

TEST(Idx, DistinctErrors) {
  const auto set = synthetic_set(4, 5, 5, 3);
  const auto ip = scratch("err-images"), lp = scratch("err-labels");
  write_idx(ip, lp, set);
  const auto empty = scratch("empty");
  write_bytes(empty, {});
  EXPECT_THROW(load_idx(empty, lp), TruncatedPayload);

  auto bytes = read_bytes(ip);
  bytes.resize(bytes.size() - 3);
  const auto cut = scratch("cut-images");
  write_bytes(cut, bytes);
  EXPECT_THROW(load_idx(cut, lp), TruncatedPayload);

  const auto labels3 = scratch("labels3");
  auto small = set;
  small.images.pop_back();
  small.labels.pop_back();
  write_idx(scratch("unused-images"), labels3, small);
  EXPECT_THROW(load_idx(ip, labels3), CountMismatch);

  EXPECT_THROW(load_idx(lp, lp), BadMagic);
  EXPECT_THROW(load_idx(ip, ip), BadMagic);
}

TEST(Downscale, Examples) {
  EXPECT_EQ(downscale_2x2(Image(28, 28, 77)), Image(14, 14, 77));

  Image block(2, 2, std::vector<std::uint8_t>{0, 0, 255, 255});
  EXPECT_EQ(downscale_2x2(block).at(0, 0), 128);

  Image checker(4, 4);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) {
      checker.at(x, y) = (x + y) % 2 ? 255 : 0;
    }
  }
  EXPECT_EQ(downscale_2x2(checker), Image(2, 2, 128));
  EXPECT_THROW(downscale_2x2(Image(3, 4)), DimensionMismatch);
}

TEST(Downscale, MatchesDirectMean) {
  const auto set = synthetic_set(3, 28, 28, 4);
  for (const auto& img : set.images) {
    const auto small = downscale_2x2(img);
    for (std::size_t y = 0; y < 14; ++y) {
      for (std::size_t x = 0; x < 14; ++x) {
        const int sum = img.at(2 * x, 2 * y) + img.at(2 * x + 1, 2 * y) + img.at(2 * x, 2 * y + 1) +
                        img.at(2 * x + 1, 2 * y + 1);
        ASSERT_EQ(small.at(x, y), (sum + 2) / 4);
      }
    }
  }
}

TEST(Pgm, RoundTripAndDirectoryOrder) {
  const auto dir = scratch("pgm_dir");
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto set = synthetic_set(3, 7, 5, 5);
  write_pgm(dir / "b.pgm", set.images[1]);
  write_pgm(dir / "a.pgm", set.images[0]);
  write_pgm(dir / "c.pgm", set.images[2]);
  std::ofstream(dir / "notes.txt") << "ignored";
  const auto loaded = load_pgm_dir(dir);
  ASSERT_EQ(loaded.size(), 3u);
  EXPECT_EQ(loaded, set.images);

  const auto bad = scratch("bad.pgm");
  std::ofstream(bad) << "P2\n1 1\n255\n0\n";
  EXPECT_THROW(read_pgm(bad), BadMagic);
}

TEST(Collage, SmallCanvasGeometry) {
  Rng rng(1);
  CollageSpec spec{64, 64, 1};
  const auto frame = build_collage(tiles(3, 10), tiles(5, 100), spec, rng);
  EXPECT_EQ(frame.face_count(), 1u);
  EXPECT_LE(frame.manifest.size(), 4u);
  EXPECT_EQ(frame.manifest.size(), 4u);  // fill = 1
}

TEST(Collage, SameSeedSameCanvas) {
  CollageSpec spec{320, 480, 20};
  spec.nonface_fill = 0.6;
  Rng a(9), b(9), c(10);
  const auto fa = build_collage(tiles(7, 10), tiles(9, 100), spec, a);
  const auto fb = build_collage(tiles(7, 10), tiles(9, 100), spec, b);
  const auto fc = build_collage(tiles(7, 10), tiles(9, 100), spec, c);
  EXPECT_EQ(fa.canvas, fb.canvas);
  EXPECT_EQ(fa.manifest, fb.manifest);
  EXPECT_NE(fa.canvas, fc.canvas);
}

TEST(Collage, PixelAuditMatchesManifest) {
  const auto faces = tiles(5, 10);
  const auto nonfaces = tiles(6, 100);
  CollageSpec spec{192, 256, 9};
  spec.nonface_fill = 0.5;
  spec.background = 3;
  Rng rng(2);
  const auto frame = build_collage(faces, nonfaces, spec, rng);
  EXPECT_EQ(frame.face_count(), 9u);
  std::vector<std::uint8_t> covered(frame.canvas.pixels.size(), 0);
  std::set<std::pair<std::size_t, std::size_t>> origins;
  for (const auto& t : frame.manifest) {
    ASSERT_EQ(t.x % 32, 0u);
    ASSERT_EQ(t.y % 32, 0u);
    ASSERT_LE(t.x + 32, frame.canvas.width);
    ASSERT_LE(t.y + 32, frame.canvas.height);
    ASSERT_TRUE(origins.insert({t.x, t.y}).second) << "overlap";
    const auto& src = t.is_face ? faces.at(t.source) : nonfaces.at(t.source);
    ASSERT_EQ(frame.canvas.crop(t.x, t.y, 32, 32), src);
    for (std::size_t y = 0; y < 32; ++y) {
      for (std::size_t x = 0; x < 32; ++x) {
        covered[(t.y + y) * frame.canvas.width + t.x + x] = 1;
      }
    }
  }
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (!covered[i]) {
      ASSERT_EQ(frame.canvas.pixels[i], 3);
    }
  }
}

TEST(Collage, UhdFrameWithManyFaces) {
  Rng rng(3);
  CollageSpec spec{2160, 3840, 798};
  const auto frame = build_collage(tiles(10, 10), tiles(10, 100), spec, rng);
  EXPECT_EQ(frame.face_count(), 798u);
}

TEST(Collage, TooManyFacesThrows) {
  Rng rng(4);
  CollageSpec spec{64, 64, 5};
  EXPECT_THROW(build_collage(tiles(2, 10), tiles(2, 100), spec, rng), PlacementError);
}

TEST(Collage, ManifestJsonLinesRoundTrip) {
  Rng rng(5);
  CollageSpec spec{128, 128, 4};
  const auto frame = build_collage(tiles(2, 10), tiles(2, 100), spec, rng);
  const auto path = scratch("manifest.jsonl");
  write_manifest(path, frame);
  const auto back = read_manifest(path);
  ASSERT_EQ(back.size(), frame.manifest.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].x, frame.manifest[i].x);
    EXPECT_EQ(back[i].y, frame.manifest[i].y);
    EXPECT_EQ(back[i].is_face, frame.manifest[i].is_face);
  }
}

TEST(SlidingWindows, CountsAndOrder) {
  EXPECT_EQ(sliding_windows(Image(64, 64), 32, 32).size(), 4u);
  EXPECT_EQ(sliding_windows(Image(32, 32), 32, 1).size(), 1u);
  const auto uhd = WindowGrid(2160, 3840, 32, 1);
  EXPECT_EQ(uhd.size(), 8'109'361u);  // about 8 million patches
  const WindowGrid g(10, 12, 4, 3);
  EXPECT_EQ(g[0], (WindowOrigin{0, 0}));
  EXPECT_EQ(g[1], (WindowOrigin{3, 0}));
  EXPECT_EQ(g[g.cols()], (WindowOrigin{0, 3}));
  EXPECT_THROW(sliding_windows(Image(20, 40), 32, 1), GeometryError);
}

TEST(Recall, Examples) {
  std::vector<Tile> manifest;
  for (std::size_t i = 0; i < 4; ++i) {
    manifest.push_back({i * 32, 0, true, 0});
  }
  manifest.push_back({128, 0, false, 0});
  std::vector<WindowOrigin> all{{5, 5}, {40, 31}, {64, 0}, {127, 10}, {130, 2}};
  EXPECT_DOUBLE_EQ(recall_on_manifest(all, manifest).recall(), 1.0);
  std::vector<WindowOrigin> none{{130, 2}, {0, 40}};
  EXPECT_DOUBLE_EQ(recall_on_manifest(none, manifest).recall(), 0.0);

  std::vector<Tile> many;
  std::vector<WindowOrigin> hits;
  for (std::size_t i = 0; i < 798; ++i) {
    many.push_back({(i % 100) * 32, (i / 100) * 32, true, 0});
    if (i < 720) {
      hits.push_back({(i % 100) * 32 + 31, (i / 100) * 32 + 31});
    }
  }
  const auto r = recall_on_manifest(hits, many);
  EXPECT_EQ(r.found, 720u);
  EXPECT_NEAR(r.recall(), 0.902, 0.0005);
}
