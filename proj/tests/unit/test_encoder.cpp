#include <gtest/gtest.h>

#include <cstdlib>
#include <numeric>
#include <sstream>

#include "eon/encoder.hpp"
#include "eon/errors.hpp"
#include "eon/image.hpp"
#include "helpers.hpp"

using namespace eon;

namespace {

// Oracle: textbook valid correlation, written independently of convolve().
std::int32_t direct_response(const Image& img, const FilterBank& bank, std::size_t f, std::size_t x, std::size_t y) {
  std::int32_t acc = 0;
  for (std::size_t dy = 0; dy < bank.kernel_side(); ++dy) {
    for (std::size_t dx = 0; dx < bank.kernel_side(); ++dx) {
      acc += bank.coeff(f, dy, dx) * static_cast<std::int32_t>(img.at(x + dx, y + dy));
    }
  }
  return acc;
}

Image random_image(std::size_t w, std::size_t h, test::TestRng& rng) {
  Image img(w, h);
  for (auto& p : img.pixels) {
    p = static_cast<std::uint8_t>(rng.below(256));
  }
  return img;
}

FilterBank horizontal_pair() {
  // One 2x2 kernel: -1 +1 on the top row. Zero-sum, responds to a rising step to the right.
  return FilterBank(1, 2, {-1, 1, 0, 0});
}

} // namespace

TEST(FilterBank, RejectsNonZeroSumKernels) {
  EXPECT_THROW(FilterBank(1, 2, {1, 0, 0, 0}), ContractViolation);
  EXPECT_THROW(FilterBank(1, 2, {1, -1, 0}), ContractViolation);
}

TEST(FilterBank, DefaultBankIsZeroSumWithEqualL1) {
  for (const std::uint8_t f : {std::uint8_t{4}, std::uint8_t{8}}) {
    const auto bank = FilterBank::oriented_edges(f, 5);
    ASSERT_EQ(bank.filters(), f);
    std::int64_t l1_first = -1;
    for (std::size_t k = 0; k < f; ++k) {
      const auto kern = bank.kernel(k);
      EXPECT_EQ(std::accumulate(kern.begin(), kern.end(), 0), 0) << "kernel " << k;
      std::int64_t l1 = 0;
      for (const auto c : kern) {
        l1 += std::abs(c);
      }
      if (l1_first < 0) {
        l1_first = l1;
      }
      EXPECT_EQ(l1, l1_first) << "kernel " << k;
    }
  }
}

TEST(FilterBank, OrientationsAreDistinct) {
  const auto bank = FilterBank::oriented_edges(8, 5);
  for (std::size_t a = 0; a < 8; ++a) {
    for (std::size_t b = a + 1; b < 8; ++b) {
      const auto ka = bank.kernel(a), kb = bank.kernel(b);
      EXPECT_FALSE(std::equal(ka.begin(), ka.end(), kb.begin())) << a << " vs " << b;
    }
  }
}

TEST(FilterBank, TextRoundTrip) {
  const auto bank = FilterBank::oriented_edges(8, 5);
  std::stringstream ss;
  bank.write(ss);
  EXPECT_EQ(FilterBank::parse(ss), bank);

  std::istringstream commented("# two kernels\n2 2\n-1 1\n0 0\n\n# second\n0 0\n1 -1\n");
  const auto parsed = FilterBank::parse(commented);
  EXPECT_EQ(parsed.filters(), 2);
  EXPECT_EQ(parsed.coeff(1, 1, 0), 1);

  std::istringstream short_input("1 2\n-1 1\n0\n");
  EXPECT_THROW(FilterBank::parse(short_input), FormatError);
}

TEST(Convolve, ConstantPatchGivesZero) {
  const auto bank = FilterBank::oriented_edges(8, 5);
  const auto maps = convolve(Image(14, 14, 173), bank);
  EXPECT_EQ(maps.width, 10u);
  EXPECT_EQ(maps.height, 10u);
  for (const auto v : maps.values) {
    ASSERT_EQ(v, 0);
  }
}

TEST(Convolve, StepEdgePeaksOnEdgeColumn) {
  Image img(6, 6);
  for (std::size_t y = 0; y < 6; ++y) {
    for (std::size_t x = 3; x < 6; ++x) {
      img.at(x, y) = 100;
    }
  }
  const auto maps = convolve(img, horizontal_pair());
  ASSERT_EQ(maps.width, 5u);
  for (std::size_t y = 0; y < 5; ++y) {
    for (std::size_t x = 0; x < 5; ++x) {
      EXPECT_EQ(maps.at(0, x, y), x == 2 ? 100 : 0) << x << "," << y;
    }
  }
}

TEST(Convolve, MatchesDirectOracle) {
  test::TestRng rng(1);
  const auto bank = FilterBank::oriented_edges(8, 5);
  for (int t = 0; t < 5; ++t) {
    const auto img = random_image(14, 14, rng);
    const auto maps = convolve(img, bank);
    for (std::size_t f = 0; f < 8; ++f) {
      for (std::size_t y = 0; y < 10; ++y) {
        for (std::size_t x = 0; x < 10; ++x) {
          ASSERT_EQ(maps.at(f, x, y), direct_response(img, bank, f, x, y));
        }
      }
    }
  }
}

TEST(Convolve, TooSmallImageThrows) {
  EXPECT_THROW(convolve(Image(4, 4), FilterBank::oriented_edges(8, 5)), DimensionMismatch);
}

TEST(LateralInhibit, AllBelowThresholdIsSilent) {
  ResponseMaps r{2, 2, 2, {5, 5, 5, 5, 3, 3, 3, 3}};
  EXPECT_EQ(lateral_inhibit(r, 5).active_count(), 0u);
}

TEST(LateralInhibit, DominantFilterWins) {
  ResponseMaps r{3, 1, 1, {1, 9, 4}};
  EXPECT_EQ(lateral_inhibit(r, 0)[0], 2);
}

TEST(LateralInhibit, ExhaustiveTwoFilterOnePixel) {
  // Oracle: lowest index among the maxima, silent unless the max exceeds theta.
  for (int a = -3; a <= 3; ++a) {
    for (int b = -3; b <= 3; ++b) {
      for (int theta = -2; theta <= 2; ++theta) {
        ResponseMaps r{2, 1, 1, {a, b}};
        const int best = std::max(a, b);
        const int expected = best > theta ? (a >= b ? 1 : 2) : 0;
        ASSERT_EQ(lateral_inhibit(r, theta)[0], expected) << a << " " << b << " " << theta;
      }
    }
  }
}

TEST(Encode, MnistGeometry) {
  test::TestRng rng(2);
  const auto s = encode(random_image(14, 14, rng), FilterBank::oriented_edges(8, 5));
  EXPECT_EQ(s.side(), 10u);
  EXPECT_EQ(s.filters(), 8);
}

TEST(Encode, ThetaIsMonotone) {
  test::TestRng rng(3);
  const auto bank = FilterBank::oriented_edges(8, 5);
  for (int t = 0; t < 20; ++t) {
    const auto img = random_image(14, 14, rng);
    auto prev = encode(img, bank, -1);
    for (const int theta : {0, 50, 200, 1000, 5000}) {
      const auto cur = encode(img, bank, theta);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (cur[i] != 0) {
          ASSERT_EQ(cur[i], prev[i]);  // still firing pixels keep their winner
        }
      }
      ASSERT_LE(cur.active_count(), prev.active_count());
      prev = cur;
    }
  }
}

TEST(Encode, ShiftInvariance) {
  // A bright square moved by (2, 1) inside an 18x18 canvas: spike vectors
  // agree on the overlapping valid region.
  const auto bank = FilterBank::oriented_edges(8, 5);
  Image a(18, 18, 20), b(18, 18, 20);
  for (std::size_t y = 5; y < 10; ++y) {
    for (std::size_t x = 4; x < 9; ++x) {
      a.at(x, y) = 220;
      b.at(x + 2, y + 1) = 220;
    }
  }
  const auto sa = encode(a, bank), sb = encode(b, bank);
  const std::size_t d = sa.side();
  for (std::size_t y = 0; y + 1 < d; ++y) {
    for (std::size_t x = 0; x + 2 < d; ++x) {
      ASSERT_EQ(sa[y * d + x], sb[(y + 1) * d + x + 2]) << x << "," << y;
    }
  }
}

TEST(EncodeFrame, WindowEqualsPatchEncoding) {
  test::TestRng rng(4);
  const auto bank = FilterBank::oriented_edges(4, 5);
  const auto frame = random_image(70, 45, rng);
  const auto map = encode_frame(frame, bank);
  EXPECT_EQ(map.width(), 66u);
  EXPECT_EQ(map.height(), 41u);
  std::vector<std::uint64_t> buf(ExpandedVector::word_count(28 * 28, 4));
  for (std::size_t y = 0; y + 32 <= 45; y += 3) {
    for (std::size_t x = 0; x + 32 <= 70; x += 5) {
      const auto direct = encode(frame.crop(x, y, 32, 32), bank);
      ASSERT_EQ(map.window(x, y, 28), direct) << x << "," << y;
      map.window_expanded(x, y, 28, buf);
      const auto e = expand(direct);
      ASSERT_TRUE(std::equal(buf.begin(), buf.end(), e.words().begin()));
    }
  }
  EXPECT_THROW(map.window(40, 0, 28), GeometryError);
}
