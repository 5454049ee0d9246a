#pragma once

// Background detection and Weber's-law logarithmic contrast enhancement for
// grayscale images.
//
// Every method maps a pixel v with background level b through
//   g = b + k * ln(v + 1),   k = (255 - b) / ln(256),
// which sends 0 to b and 255 to 255. The methods differ only in how b is found:
//   blocks            b = minimum of the l1 x l2 tile holding the pixel
//   erosion-dilation  b = midpoint of erosion and dilation at scale mu
//   reconstruction    b = opening by reconstruction at scale mu

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lumen/error.hpp"
#include "lumen/metrics.hpp"
#include "lumen/morphology.hpp"
#include "lumen/pixelbuf.hpp"

namespace lumen {

inline const double kLn256 = std::log(256.0);

/// Gain that makes the log map reach 255 at v = 255 from offset m.
inline double weber_k(double m) { return (255.0 - m) / kLn256; }

inline double weber_log_map(double v, double base, double k) { return base + k * std::log(v + 1.0); }

struct BlockSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const BlockSize&, const BlockSize&) = default;
};

struct BlockStats {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  std::uint8_t min = 0;
  std::uint8_t max = 0;
  double tau = 0.0;  // (min + max) / 2, splits dark from clear pixels
  double k = 0.0;    // weber_k(min)

  bool is_dark(std::uint8_t v) const noexcept { return v < tau; }
};

/// Left-to-right, top-to-bottom tiling; the last column and row of tiles take
/// whatever remains when the image size is not a multiple of the block size.
struct BlockGrid {
  BlockSize block;
  int cols = 0;
  int rows = 0;
  std::vector<BlockStats> blocks;

  const BlockStats& at(int col, int row) const { return blocks[static_cast<std::size_t>(row) * cols + col]; }
};

inline BlockGrid block_stats(const GrayImage& f, BlockSize size) {
  if (size.width < 1 || size.height < 1 || size.width > f.width() || size.height > f.height()) {
    throw Error(ErrorCode::BadBlockSize, "block " + std::to_string(size.width) + "x" +
                                             std::to_string(size.height) + " does not fit a " +
                                             std::to_string(f.width()) + "x" +
                                             std::to_string(f.height()) + " image");
  }
  BlockGrid grid;
  grid.block = size;
  grid.cols = (f.width() + size.width - 1) / size.width;
  grid.rows = (f.height() + size.height - 1) / size.height;
  grid.blocks.reserve(static_cast<std::size_t>(grid.cols) * grid.rows);
  for (int by = 0; by < grid.rows; ++by) {
    for (int bx = 0; bx < grid.cols; ++bx) {
      BlockStats s;
      s.x = bx * size.width;
      s.y = by * size.height;
      s.width = std::min(size.width, f.width() - s.x);
      s.height = std::min(size.height, f.height() - s.y);
      std::uint8_t lo = 255;
      std::uint8_t hi = 0;
      for (int y = s.y; y < s.y + s.height; ++y) {
        for (int x = s.x; x < s.x + s.width; ++x) {
          lo = std::min(lo, f(x, y));
          hi = std::max(hi, f(x, y));
        }
      }
      s.min = lo;
      s.max = hi;
      s.tau = (static_cast<double>(lo) + static_cast<double>(hi)) / 2.0;
      s.k = weber_k(lo);
      grid.blocks.push_back(s);
    }
  }
  return grid;
}

/// Each tile is stretched independently with b = tile minimum.
inline GrayImage enhance_blocks(const GrayImage& f, BlockSize size) {
  const BlockGrid grid = block_stats(f, size);
  GrayImage out(f.width(), f.height());
  for (const auto& s : grid.blocks) {
    for (int y = s.y; y < s.y + s.height; ++y) {
      for (int x = s.x; x < s.x + s.width; ++x) {
        out(x, y) = quantize(weber_log_map(f(x, y), s.min, s.k));
      }
    }
  }
  return out;
}

enum class BackgroundMethod { Blocks, ErosionDilation, Reconstruction };

constexpr std::string_view to_string(BackgroundMethod m) {
  switch (m) {
    case BackgroundMethod::Blocks: return "blocks";
    case BackgroundMethod::ErosionDilation: return "eroded";
    case BackgroundMethod::Reconstruction: return "reconstruction";
  }
  return "unknown";
}

/// Per-pixel background level tau in [0, 255].
struct BackgroundMap {
  int width = 0;
  int height = 0;
  std::vector<double> tau;
  BackgroundMethod method = BackgroundMethod::Reconstruction;

  double operator()(int x, int y) const { return tau[static_cast<std::size_t>(y) * width + x]; }

  GrayImage to_image() const {
    GrayImage img(width, height);
    auto s = img.samples();
    for (std::size_t i = 0; i < tau.size(); ++i) s[i] = quantize(tau[i]);
    return img;
  }
};

namespace detail {

inline void require_background_scale(StructuringElement se) {
  if (se.mu() < 1) throw Error(ErrorCode::InvalidArgument, "background scale mu must be >= 1");
}

}  // namespace detail

/// Tile-wise tau = (m_i + M_i) / 2 spread over the tile's pixels.
inline BackgroundMap background_blocks(const GrayImage& f, BlockSize size) {
  const BlockGrid grid = block_stats(f, size);
  BackgroundMap bg{f.width(), f.height(), std::vector<double>(f.pixel_count()), BackgroundMethod::Blocks};
  for (const auto& s : grid.blocks) {
    for (int y = s.y; y < s.y + s.height; ++y) {
      for (int x = s.x; x < s.x + s.width; ++x) {
        bg.tau[static_cast<std::size_t>(y) * f.width() + x] = s.tau;
      }
    }
  }
  return bg;
}

/// tau = (erode(f) + dilate(f)) / 2, the pixelwise analog of the tile midpoint.
inline BackgroundMap background_erosion_dilation(const GrayImage& f, StructuringElement se) {
  detail::require_background_scale(se);
  const GrayImage lo = erode(f, se);
  const GrayImage hi = dilate(f, se);
  BackgroundMap bg{f.width(), f.height(), std::vector<double>(f.pixel_count()),
                   BackgroundMethod::ErosionDilation};
  const auto l = lo.samples();
  const auto h = hi.samples();
  for (std::size_t i = 0; i < bg.tau.size(); ++i) {
    bg.tau[i] = (static_cast<double>(l[i]) + static_cast<double>(h[i])) / 2.0;
  }
  return bg;
}

inline BackgroundMap background_reconstruction(const GrayImage& f, StructuringElement se) {
  detail::require_background_scale(se);
  const GrayImage r = opening_by_reconstruction(f, se);
  BackgroundMap bg{f.width(), f.height(), std::vector<double>(f.pixel_count()),
                   BackgroundMethod::Reconstruction};
  const auto s = r.samples();
  std::copy(s.begin(), s.end(), bg.tau.begin());
  return bg;
}

inline GrayImage enhance_with_background(const GrayImage& f, const BackgroundMap& bg) {
  if (bg.width != f.width() || bg.height != f.height() || bg.tau.size() != f.pixel_count()) {
    throw Error(ErrorCode::DimensionMismatch, "background map does not match image size");
  }
  GrayImage out(f.width(), f.height());
  const auto in = f.samples();
  auto o = out.samples();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double b = bg.tau[i];
    o[i] = quantize(weber_log_map(in[i], b, weber_k(b)));
  }
  return out;
}

/// Scale of a morphological method or tile size of the block method.
using SweepParam = std::variant<StructuringElement, BlockSize>;

inline std::string to_string(const SweepParam& p) {
  if (const auto* se = std::get_if<StructuringElement>(&p)) return "mu=" + std::to_string(se->mu());
  const auto& b = std::get<BlockSize>(p);
  return std::to_string(b.width) + "x" + std::to_string(b.height);
}

/// Background map for one method/parameter pair.
inline BackgroundMap estimate_background(const GrayImage& f, BackgroundMethod method, const SweepParam& param) {
  if (method == BackgroundMethod::Blocks) {
    const auto* size = std::get_if<BlockSize>(&param);
    if (!size) throw Error(ErrorCode::InvalidArgument, "blocks method takes a block size");
    return background_blocks(f, *size);
  }
  const auto* se = std::get_if<StructuringElement>(&param);
  if (!se) throw Error(ErrorCode::InvalidArgument, "morphological methods take a scale mu");
  return method == BackgroundMethod::ErosionDilation ? background_erosion_dilation(f, *se)
                                                     : background_reconstruction(f, *se);
}

inline GrayImage enhance_gray(const GrayImage& f, BackgroundMethod method, const SweepParam& param) {
  if (method == BackgroundMethod::Blocks) {
    const auto* size = std::get_if<BlockSize>(&param);
    if (!size) throw Error(ErrorCode::InvalidArgument, "blocks method takes a block size");
    return enhance_blocks(f, *size);
  }
  return enhance_with_background(f, estimate_background(f, method, param));
}

/// SSIM and normalized entropy of `treated` against `original`; guard failures
/// are recorded in the report rather than thrown.
inline MetricsReport score_gray(const GrayImage& original, const GrayImage& treated) {
  MetricsReport report;
  try {
    report.ssim = ssim(original, treated);
  } catch (const Error& e) {
    report.errors.emplace_back(Metric::Ssim, e.code());
  }
  try {
    report.normalized_entropy = normalized_entropy(original, treated);
  } catch (const Error& e) {
    report.errors.emplace_back(Metric::NormalizedEntropy, e.code());
  }
  return report;
}

struct SweepEntry {
  SweepParam param;
  GrayImage image;
  MetricsReport report;
};

/// Runs one method at each parameter, in request order.
inline std::vector<SweepEntry> enhance_sweep(const GrayImage& f, BackgroundMethod method,
                                             const std::vector<SweepParam>& params) {
  if (params.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one parameter");
  std::vector<SweepEntry> entries;
  entries.reserve(params.size());
  for (const auto& p : params) {
    try {
      GrayImage g = enhance_gray(f, method, p);
      MetricsReport report = score_gray(f, g);
      entries.push_back({p, std::move(g), std::move(report)});
    } catch (const Error& e) {
      throw Error(e.code(), std::string(to_string(method)) + " at " + to_string(p) + ": " + e.detail());
    }
  }
  return entries;
}

}  // namespace lumen
