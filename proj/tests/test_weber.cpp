#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "lumen/weber.hpp"
#include "oracles.hpp"

using namespace lumen;

namespace {

// Scalar formula, evaluated independently of the library.
std::uint8_t log_map_ref(double v, double b) {
  const double g = b + (255.0 - b) / std::log(256.0) * std::log(v + 1.0);
  return static_cast<std::uint8_t>(std::clamp(std::floor(g + 0.5), 0.0, 255.0));
}

double mean(const GrayImage& f) {
  return std::accumulate(f.samples().begin(), f.samples().end(), 0.0) / static_cast<double>(f.pixel_count());
}

}  // namespace

TEST(WeberK, Values) {
  EXPECT_DOUBLE_EQ(weber_k(255), 0.0);
  EXPECT_NEAR(weber_k(0), 45.98590442833571, 1e-12);
  for (int m = 0; m < 255; ++m) EXPECT_GT(weber_k(m), weber_k(m + 1));
}

TEST(WeberLogMap, Boundaries) {
  for (double b : {0.0, 17.5, 100.0, 254.0}) {
    EXPECT_DOUBLE_EQ(weber_log_map(0, b, weber_k(b)), b);
    EXPECT_NEAR(weber_log_map(255, b, weber_k(b)), 255.0, 1e-12);
  }
  EXPECT_NEAR(weber_log_map(100, 100, weber_k(100)), 229.00284747831603, 1e-10);
}

TEST(BlockStatsTest, RemainderTilingAndCriteria) {
  GrayImage f(5, 3, 50);
  f(0, 0) = 10;
  f(1, 1) = 200;
  f(4, 2) = 0;
  const auto grid = block_stats(f, {2, 2});
  ASSERT_EQ(grid.cols, 3);
  ASSERT_EQ(grid.rows, 2);
  const auto& first = grid.at(0, 0);
  EXPECT_EQ(first.min, 10);
  EXPECT_EQ(first.max, 200);
  EXPECT_DOUBLE_EQ(first.tau, 105.0);
  EXPECT_DOUBLE_EQ(first.k, weber_k(10));
  EXPECT_TRUE(first.is_dark(50));
  const auto& corner = grid.at(2, 1);
  EXPECT_EQ(corner.width, 1);
  EXPECT_EQ(corner.height, 1);
  EXPECT_EQ(corner.min, 0);
  EXPECT_DOUBLE_EQ(corner.k, 255.0 / std::log(256.0));
  for (const auto& b : grid.blocks) {
    EXPECT_LE(b.min, b.max);
    EXPECT_DOUBLE_EQ(b.tau, (b.min + b.max) / 2.0);
  }
}

TEST(BlockStatsTest, ConstantImage) {
  const auto grid = block_stats(GrayImage(8, 8, 77), {3, 3});
  for (const auto& b : grid.blocks) {
    EXPECT_EQ(b.min, 77);
    EXPECT_EQ(b.max, 77);
    EXPECT_DOUBLE_EQ(b.tau, 77.0);
  }
}

TEST(BlockStatsTest, BadSizes) {
  const GrayImage f(4, 4);
  for (BlockSize s : {BlockSize{0, 2}, BlockSize{2, -1}, BlockSize{5, 2}, BlockSize{2, 5}}) {
    try {
      block_stats(f, s);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadBlockSize);
    }
  }
}

TEST(EnhanceBlocks, FixedPointsAndConstant) {
  EXPECT_EQ(enhance_blocks(GrayImage(9, 7, 0), {4, 4}), GrayImage(9, 7, 0));
  EXPECT_EQ(enhance_blocks(GrayImage(9, 7, 255), {4, 4}), GrayImage(9, 7, 255));
  EXPECT_EQ(enhance_blocks(GrayImage(6, 6, 100), {6, 6}), GrayImage(6, 6, 229));
}

TEST(EnhanceBlocks, SingleBlockIsGlobalLogMap) {
  std::mt19937 rng(21);
  const auto f = oracle::random_gray(rng, 12, 10);
  const auto g = enhance_blocks(f, {12, 10});
  const double m = *std::min_element(f.samples().begin(), f.samples().end());
  for (std::size_t i = 0; i < f.sample_count(); ++i) EXPECT_EQ(g.samples()[i], log_map_ref(f.samples()[i], m));
}

TEST(Background, ErosionDilationMidpoint) {
  const auto c = background_erosion_dilation(GrayImage(6, 6, 40), StructuringElement(2));
  for (double t : c.tau) EXPECT_DOUBLE_EQ(t, 40.0);

  GrayImage board(6, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) board(x, y) = (x + y) % 2 ? 255 : 0;
  const auto bg = background_erosion_dilation(board, StructuringElement(1));
  for (int y = 1; y < 5; ++y)
    for (int x = 1; x < 5; ++x) EXPECT_DOUBLE_EQ(bg(x, y), 127.5);

  std::mt19937 rng(2);
  const auto f = oracle::random_gray(rng, 16, 16);
  const auto r = background_erosion_dilation(f, StructuringElement(2));
  const auto lo = oracle::erode(f, 2), hi = oracle::dilate(f, 2);
  for (std::size_t i = 0; i < f.pixel_count(); ++i) {
    EXPECT_DOUBLE_EQ(r.tau[i], (lo.samples()[i] + hi.samples()[i]) / 2.0);
  }
  EXPECT_THROW(background_erosion_dilation(f, StructuringElement(0)), Error);
}

TEST(Background, ReconstructionMatchesOracle) {
  std::mt19937 rng(6);
  const auto f = oracle::random_gray(rng, 16, 16);
  const auto bg = background_reconstruction(f, StructuringElement(1));
  const auto ref = oracle::opening_by_reconstruction(f, 1);
  for (std::size_t i = 0; i < f.pixel_count(); ++i) {
    EXPECT_EQ(bg.tau[i], ref.samples()[i]);
    EXPECT_LE(bg.tau[i], f.samples()[i]);
  }
  EXPECT_EQ(bg.method, BackgroundMethod::Reconstruction);
}

TEST(EnhanceWithBackground, PureLogStretchForZeroBackground) {
  std::mt19937 rng(31);
  const auto f = oracle::random_gray(rng, 8, 8);
  const BackgroundMap zero{8, 8, std::vector<double>(64, 0.0), BackgroundMethod::Blocks};
  const auto g = enhance_with_background(f, zero);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(g.samples()[i], log_map_ref(f.samples()[i], 0.0));
}

TEST(EnhanceWithBackground, WhiteStaysWhite) {
  const GrayImage white(5, 5, 255);
  std::mt19937 rng(1);
  BackgroundMap bg{5, 5, std::vector<double>(25), BackgroundMethod::Blocks};
  for (auto& t : bg.tau) t = static_cast<double>(rng() % 256);
  EXPECT_EQ(enhance_with_background(white, bg), white);
}

TEST(EnhanceWithBackground, ReconstructionFixture) {
  GrayImage f(4, 4, std::vector<std::uint8_t>{10, 20, 30, 40, 50, 60, 70, 80, 15, 25, 35, 45, 5, 90, 12, 3});
  // Frozen from the naive reconstruction oracle plus the scalar formula.
  const GrayImage expected(4, 4, std::vector<std::uint8_t>{116, 149, 169, 181, 190, 197, 203, 208, 135, 160,
                                                             175, 185, 86, 213, 124, 66});
  const auto bg = background_reconstruction(f, StructuringElement(1));
  EXPECT_EQ(enhance_with_background(f, bg), expected);
}

TEST(EnhanceWithBackground, DimensionMismatch) {
  const BackgroundMap bg{3, 3, std::vector<double>(9), BackgroundMethod::Blocks};
  try {
    enhance_with_background(GrayImage(4, 3), bg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(WeberProperties, FuzzRangeFixedPointsMonotoneBrightening) {
  std::mt19937 rng(500);
  for (int trial = 0; trial < 500; ++trial) {
    const int w = 4 + static_cast<int>(rng() % 20), h = 4 + static_cast<int>(rng() % 20);
    auto f = oracle::random_gray(rng, w, h);
    const int cap = 1 + static_cast<int>(rng() % 255);  // dark inputs: max < 255
    for (auto& v : f.samples()) v = static_cast<std::uint8_t>(v % cap);
    const StructuringElement se(1 + trial % 3);

    const auto rec_bg = background_reconstruction(f, se);
    const auto g_rec = enhance_with_background(f, rec_bg);
    const auto g_ed = enhance_with_background(f, background_erosion_dilation(f, se));
    const auto g_blk = enhance_blocks(f, {1 + static_cast<int>(rng() % w), 1 + static_cast<int>(rng() % h)});
    EXPECT_GE(mean(g_rec), mean(f));
    // Output samples are 8-bit by construction; since b >= 0 every method brightens pixelwise.
    for (std::size_t i = 0; i < f.pixel_count(); ++i) {
      ASSERT_GE(g_rec.samples()[i], f.samples()[i]);
      ASSERT_GE(g_ed.samples()[i], f.samples()[i]);
      ASSERT_GE(g_blk.samples()[i], f.samples()[i]);
    }

    // Where tau is constant the map is nondecreasing in the input.
    for (std::size_t i = 0; i < f.pixel_count(); ++i) {
      for (std::size_t j = i + 1; j < std::min(f.pixel_count(), i + 8); ++j) {
        if (rec_bg.tau[i] == rec_bg.tau[j] && f.samples()[i] <= f.samples()[j]) {
          ASSERT_LE(g_rec.samples()[i], g_rec.samples()[j]);
        }
      }
    }
  }
  for (int mu : {1, 2, 4}) {
    const StructuringElement se(mu);
    for (std::uint8_t c : {std::uint8_t{0}, std::uint8_t{255}}) {
      const GrayImage k(11, 9, c);
      EXPECT_EQ(enhance_with_background(k, background_reconstruction(k, se)), k);
      EXPECT_EQ(enhance_with_background(k, background_erosion_dilation(k, se)), k);
    }
  }
}

TEST(Sweep, SingletonAndDuplicates) {
  auto f = oracle::darkened(oracle::load_gray("camera"));
  const auto single = enhance_sweep(f, BackgroundMethod::Reconstruction, {StructuringElement(2)});
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].image, enhance_with_background(f, background_reconstruction(f, StructuringElement(2))));

  const auto dup = enhance_sweep(f, BackgroundMethod::ErosionDilation, {StructuringElement(1), StructuringElement(1)});
  ASSERT_EQ(dup.size(), 2u);
  EXPECT_EQ(dup[0].image, dup[1].image);
  EXPECT_EQ(dup[0].report.ssim, dup[1].report.ssim);
  EXPECT_EQ(dup[0].report.normalized_entropy, dup[1].report.normalized_entropy);
}

TEST(Sweep, GradientAcrossScalesScoredByOracle) {
  GrayImage f(48, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 48; ++x) f(x, y) = static_cast<std::uint8_t>((x + 2 * y) / 3 + ((x * 7 + y * 3) % 5) * 4);
  const auto entries = enhance_sweep(f, BackgroundMethod::Reconstruction,
                                     {StructuringElement(1), StructuringElement(2), StructuringElement(4)});
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_NE(entries[0].image, entries[1].image);
  EXPECT_NE(entries[1].image, entries[2].image);
  for (const auto& e : entries) {
    ASSERT_TRUE(e.report.normalized_entropy);
    EXPECT_NEAR(*e.report.normalized_entropy, oracle::entropy(e.image) / oracle::entropy(f), 1e-12);
    ASSERT_TRUE(e.report.ssim);
    EXPECT_NEAR(*e.report.ssim, oracle::ssim(f, e.image), 1e-10);
  }
}

TEST(Sweep, ErrorsNameTheParameter) {
  const GrayImage f(10, 10, 5);
  EXPECT_THROW(enhance_sweep(f, BackgroundMethod::Blocks, {}), Error);
  try {
    enhance_sweep(f, BackgroundMethod::Blocks, {BlockSize{4, 4}, BlockSize{20, 4}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadBlockSize);
    EXPECT_NE(std::string(e.what()).find("20x4"), std::string::npos);
  }
  // Metric guard failures stay inside the report.
  const auto entries = enhance_sweep(f, BackgroundMethod::Blocks, {BlockSize{5, 5}});
  EXPECT_EQ(entries[0].report.error(Metric::NormalizedEntropy), ErrorCode::ZeroReferenceEntropy);
  EXPECT_TRUE(entries[0].report.ssim);
}
