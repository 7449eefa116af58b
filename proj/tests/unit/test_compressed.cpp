#include <gtest/gtest.h>

#include <bit>

#include "eon/compressed.hpp"
#include "eon/errors.hpp"
#include "eon/rng.hpp"
#include "helpers.hpp"

using namespace eon;
using eon::test::cv;
using eon::test::wv;

namespace {

// Oracle: one bool per (pixel, filter), no bit packing.
std::vector<std::vector<bool>> expand_naive(const CompressedVector& v) {
  std::vector<std::vector<bool>> m(v.size(), std::vector<bool>(v.filters(), false));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i]) {
      m[i][v[i] - 1] = true;
    }
  }
  return m;
}

std::size_t dot_naive(const CompressedVector& a, const CompressedVector& b) {
  const auto ma = expand_naive(a), mb = expand_naive(b);
  std::size_t n = 0;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    for (std::size_t f = 0; f < ma[i].size(); ++f) {
      n += ma[i][f] && mb[i][f];
    }
  }
  return n;
}

} // namespace

TEST(CompressedVector, RejectsOutOfRangeElements) {
  EXPECT_THROW(CompressedVector(2, 2, {0, 1, 3, 0}), ContractViolation);
  EXPECT_THROW(CompressedVector(2, 2, {0, 1, 2}), ContractViolation);
  EXPECT_THROW(CompressedVector(2, 16), ContractViolation);
}

TEST(CompressedVector, PackedRoundTripLowNibbleFirst) {
  const auto v = cv({1, 2, 15, 0, 7, 3, 0, 9, 4}, 15);
  const auto bytes = v.packed();
  ASSERT_EQ(bytes.size(), 5u);
  EXPECT_EQ(bytes[0], 0x21);
  EXPECT_EQ(bytes[1], 0x0F);
  EXPECT_EQ(bytes[4], 0x04);
  EXPECT_EQ(CompressedVector::from_packed(3, 15, bytes), v);
}

TEST(Expand, SilentVectorIsAllZero) {
  const auto e = expand(cv({0, 0, 0, 0}, 2));
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_FALSE(e.test(i, 0));
    EXPECT_FALSE(e.test(i, 1));
  }
}

TEST(Expand, HandEnumeratedRows) {
  const auto e = expand(cv({1, 2, 0, 1}, 2));
  EXPECT_TRUE(e.test(0, 0));
  EXPECT_FALSE(e.test(0, 1));
  EXPECT_FALSE(e.test(1, 0));
  EXPECT_TRUE(e.test(1, 1));
  EXPECT_FALSE(e.test(2, 0));
  EXPECT_FALSE(e.test(2, 1));
  EXPECT_TRUE(e.test(3, 0));
  EXPECT_FALSE(e.test(3, 1));
}

TEST(Expand, CollapseRoundTripAndBitLayout) {
  test::TestRng rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto v = test::random_spikes(10, 8, 0.6, rng);
    const auto e = expand(v);
    const auto naive = expand_naive(v);
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t f = 0; f < 8; ++f) {
        ASSERT_EQ(e.test(i, f), naive[i][f]);
      }
    }
    ASSERT_EQ(collapse(e, 10), v);
  }
}

TEST(Expand, CollapseRejectsTwoFiltersAtOnePixel) {
  ExpandedVector e(4, 2);
  e.set(1, 0);
  e.set(1, 1);
  EXPECT_THROW(collapse(e, 2), ContractViolation);
}

TEST(MatchCount, HandExample) {
  EXPECT_EQ(match_count(cv({1, 2, 0, 1}, 2), wv({1, 0, 2, 1}, 2)), 2u);
}

TEST(MatchCount, SilentInputAndPerfectMatch) {
  const auto w = wv({1, 0, 2, 1}, 2);
  EXPECT_EQ(match_count(cv({0, 0, 0, 0}, 2), w), 0u);
  EXPECT_EQ(match_count(w.vector(), w), 3u);
}

TEST(MatchCount, MismatchedShapesThrow) {
  EXPECT_THROW(match_count(cv({1, 2, 0, 1}, 2), wv({1, 0, 2, 1}, 3)), DimensionMismatch);
  EXPECT_THROW(match_count(cv({1, 2, 0, 1, 0, 0, 0, 0, 0}, 2), wv({1, 0, 2, 1}, 2)), DimensionMismatch);
}

TEST(MatchCount, EqualsExpandedDotProduct) {
  test::TestRng trng(2);
  Rng rng(2);
  for (int t = 0; t < 1000; ++t) {
    const auto s = test::random_spikes(10, 8, 0.5, trng);
    const auto w = random_weights(10, 8, 64, rng);
    const auto m = match_count(s, w);
    ASSERT_EQ(m, dot_naive(s, w.vector()));
    ASSERT_EQ(m, and_popcount(expand(s).words(), expand(w.vector()).words()));
  }
}

TEST(Ineffective, HandExamples) {
  const auto s = cv({1, 2, 0, 1}, 2);
  const auto w = wv({1, 0, 2, 1}, 2);
  EXPECT_EQ(ineffective_spikes(s, w), std::vector<std::size_t>{1});
  EXPECT_EQ(ineffective_weights(s, w), std::vector<std::size_t>{2});
  EXPECT_TRUE(ineffective_spikes(w.vector(), w).empty());
  EXPECT_TRUE(ineffective_weights(w.vector(), w).empty());
}

TEST(Ineffective, InactiveWeightsAndMismatchedFilters) {
  // W = 0 is legal for the helper even though real layers use W > 0.
  const auto none = WeightVector(CompressedVector(1, 2, {0}), 0);
  EXPECT_EQ(ineffective_spikes(cv({1}, 2), none), std::vector<std::size_t>{0});

  std::vector<std::uint8_t> s2{1, 1, 0, 0};
  const auto w0 = WeightVector(CompressedVector(2, 2, {0, 0, 0, 0}), 0);
  EXPECT_EQ(ineffective_spikes(CompressedVector(2, 2, s2), w0), (std::vector<std::size_t>{0, 1}));

  const auto s = cv({2, 0, 0, 0}, 2);
  const auto w = wv({1, 1, 0, 0}, 2);
  EXPECT_EQ(ineffective_weights(s, w), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(ineffective_spikes(s, w).empty());  // pixel 0 holds the other filter
}

TEST(Ineffective, PartitionPropertiesOnRandomInstances) {
  test::TestRng trng(3);
  Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    const auto s = test::random_spikes(10, 8, 0.7, trng);
    const auto w = random_weights(10, 8, 64, rng);
    ASSERT_EQ(match_count(s, w) + ineffective_weights(s, w).size(), 64u);
    for (const auto i : ineffective_spikes(s, w)) {
      ASSERT_EQ(w[i], 0);
      ASSERT_NE(s[i], 0);
    }
  }
}

TEST(WeightVector, EnforcesActiveCount) {
  EXPECT_THROW(WeightVector(cv({1, 0, 2, 1}, 2), 2), ContractViolation);
  EXPECT_TRUE(wv({1, 0, 2, 1}, 2).invariant_holds());
}

TEST(RandomWeights, ExactlyWDistinctPixels) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto w = random_weights(10, 8, 64, rng);
    ASSERT_EQ(w.vector().active_count(), 64u);
    for (std::size_t i = 0; i < w.size(); ++i) {
      ASSERT_LE(w[i], 8);
    }
  }
  EXPECT_THROW(random_weights(2, 2, 5, rng), ContractViolation);
}
