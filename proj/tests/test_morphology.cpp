#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "lumen/morphology.hpp"
#include "oracles.hpp"

using namespace lumen;

namespace {

GrayImage from_rows(const std::vector<std::vector<int>>& rows) {
  GrayImage img(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) img(x, y) = static_cast<std::uint8_t>(rows[y][x]);
  return img;
}

}  // namespace

TEST(StructuringElementTest, Sides) {
  EXPECT_EQ(StructuringElement(0).side(), 1);
  EXPECT_EQ(StructuringElement(1).side(), 3);
  EXPECT_EQ(StructuringElement(4).side(), 9);
  EXPECT_THROW(StructuringElement(-1), Error);
}

TEST(Morphology, ConstantAndIdentityWindow) {
  const GrayImage c(7, 5, 93);
  std::mt19937 rng(3);
  const auto f = oracle::random_gray(rng, 9, 6);
  for (int mu : {0, 1, 3}) {
    const StructuringElement se(mu);
    EXPECT_EQ(erode(c, se), c);
    EXPECT_EQ(dilate(c, se), c);
    EXPECT_EQ(open(c, se), c);
    EXPECT_EQ(close(c, se), c);
    EXPECT_EQ(opening_by_reconstruction(c, se), c);
  }
  EXPECT_EQ(erode(f, StructuringElement(0)), f);
  EXPECT_EQ(dilate(f, StructuringElement(0)), f);
  EXPECT_EQ(opening_by_reconstruction(f, StructuringElement(0)), f);
}

TEST(Morphology, DilationImpulseResponse) {
  GrayImage f(5, 5, 0);
  f(2, 2) = 255;
  const auto d = dilate(f, StructuringElement(1));
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) {
      const bool inside = x >= 1 && x <= 3 && y >= 1 && y <= 3;
      EXPECT_EQ(d(x, y), inside ? 255 : 0) << x << "," << y;
    }
}

TEST(Morphology, MatchesBruteForce) {
  std::mt19937 rng(20240601);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = oracle::random_gray(rng, 16, 16);
    for (int mu : {1, 2, 3}) {
      const StructuringElement se(mu);
      EXPECT_EQ(erode(f, se), oracle::erode(f, mu));
      EXPECT_EQ(dilate(f, se), oracle::dilate(f, mu));
      EXPECT_EQ(open(f, se), oracle::dilate(oracle::erode(f, mu), mu));
      EXPECT_EQ(close(f, se), oracle::erode(oracle::dilate(f, mu), mu));
      EXPECT_EQ(opening_by_reconstruction(f, se), oracle::opening_by_reconstruction(f, mu));
    }
  }
}

TEST(Morphology, NonSquareImagesMatchBruteForce) {
  std::mt19937 rng(77);
  for (auto [w, h] : {std::pair{1, 9}, {13, 1}, {5, 21}, {30, 4}}) {
    const auto f = oracle::random_gray(rng, w, h);
    EXPECT_EQ(erode(f, StructuringElement(2)), oracle::erode(f, 2));
    EXPECT_EQ(dilate(f, StructuringElement(4)), oracle::dilate(f, 4));
    EXPECT_EQ(opening_by_reconstruction(f, StructuringElement(1)), oracle::opening_by_reconstruction(f, 1));
  }
}

TEST(Morphology, OpeningIdempotentClosingExtensive) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = oracle::random_gray(rng, 16, 12);
    const StructuringElement se(1 + trial % 3);
    EXPECT_EQ(open(open(f, se), se), open(f, se));
    EXPECT_EQ(close(close(f, se), se), close(f, se));
    EXPECT_TRUE(oracle::leq(f, close(f, se)));
  }
}

TEST(Reconstruction, FixedPointsAndGuards) {
  std::mt19937 rng(4);
  const auto mask = oracle::random_gray(rng, 10, 10);
  EXPECT_EQ(reconstruct_by_dilation(mask, mask), mask);
  const GrayImage zeros(10, 10, 0);
  EXPECT_EQ(reconstruct_by_dilation(zeros, mask), zeros);

  try {
    reconstruct_by_dilation(GrayImage(3, 3), GrayImage(3, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  GrayImage marker(3, 3, 0);
  marker(1, 1) = 10;
  try {
    reconstruct_by_dilation(marker, GrayImage(3, 3, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MarkerExceedsMask);
  }
}

TEST(Reconstruction, TwoPlateauFixture) {
  const auto mask = from_rows({{200, 200, 200, 0, 0},
                               {200, 200, 200, 0, 100},
                               {200, 200, 200, 0, 100},
                               {0, 0, 0, 0, 100},
                               {0, 100, 100, 100, 100}});
  const auto expected = from_rows({{200, 200, 200, 0, 0},
                                   {200, 200, 200, 0, 0},
                                   {200, 200, 200, 0, 0},
                                   {0, 0, 0, 0, 0},
                                   {0, 0, 0, 0, 0}});
  const auto marker = erode(mask, StructuringElement(1));
  EXPECT_EQ(reconstruct_by_dilation(marker, mask), expected);
  EXPECT_EQ(oracle::reconstruct(marker, mask), expected);
}

TEST(Reconstruction, TwoSquaresFixture) {
  GrayImage f(8, 8, 20);
  for (int y = 1; y <= 2; ++y)
    for (int x = 1; x <= 2; ++x) f(x, y) = 200;
  for (int y = 2; y <= 5; ++y)
    for (int x = 4; x <= 7; ++x) f(x, y) = 150;
  GrayImage expected(8, 8, 20);
  for (int y = 2; y <= 5; ++y)
    for (int x = 4; x <= 7; ++x) expected(x, y) = 150;
  EXPECT_EQ(opening_by_reconstruction(f, StructuringElement(1)), expected);
}

TEST(Reconstruction, OutputIsStableUnderAnotherPass) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = oracle::random_gray(rng, 20, 14);
    const auto r = opening_by_reconstruction(f, StructuringElement(2));
    EXPECT_EQ(oracle::pointwise_min(oracle::dilate(r, 1), f), r);
  }
}

TEST(Reconstruction, LargeImageMatchesNaiveFixpoint) {
  auto f = oracle::load_gray("coins");
  const auto marker = erode(f, StructuringElement(3));
  EXPECT_EQ(reconstruct_by_dilation(marker, f), oracle::reconstruct(marker, f));
}
