#pragma once

// 8x8 block DCT enhancement of color images.
//
// Luma blocks are brightened by remapping their DC coefficient through a
// monotone curve on [0, 1]; the gain lambda = DC'/DC can also be applied to
// the AC coefficients (preserving each block's AC/DC ratio) and to the
// co-located chroma blocks about the neutral chroma DC.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lumen/error.hpp"
#include "lumen/pixelbuf.hpp"

namespace lumen {

inline constexpr int kBlock = 8;
inline constexpr double kMaxDc = 8.0 * 255.0;       // orthonormal DC of a white block
inline constexpr double kNeutralChromaDc = 8.0 * 128.0;
inline constexpr double kDcGuard = 1e-6;
inline constexpr double kChromaGainMin = 0.5;
inline constexpr double kChromaGainMax = 2.0;

/// 8x8 real block, row-major. The tag separates pixel samples from coefficients.
template <class Tag>
struct Block8 {
  std::array<double, kBlock * kBlock> v{};

  double& operator()(int row, int col) noexcept { return v[static_cast<std::size_t>(row * kBlock + col)]; }
  double operator()(int row, int col) const noexcept { return v[static_cast<std::size_t>(row * kBlock + col)]; }

  friend bool operator==(const Block8&, const Block8&) = default;
};

struct SampleTag {};
struct CoeffTag {};
using SampleBlock = Block8<SampleTag>;
/// (0,0) is the DC coefficient, everything else AC.
using CoeffBlock = Block8<CoeffTag>;

namespace detail {

// basis[u][x] = a(u) cos((2x + 1) u pi / 16), a(0) = sqrt(1/8), a(u>0) = 1/2.
inline const std::array<std::array<double, kBlock>, kBlock>& dct_basis() {
  static const auto basis = [] {
    std::array<std::array<double, kBlock>, kBlock> c{};
    for (int u = 0; u < kBlock; ++u) {
      const double a = u == 0 ? std::sqrt(1.0 / kBlock) : std::sqrt(2.0 / kBlock);
      for (int x = 0; x < kBlock; ++x) {
        c[u][x] = a * std::cos((2 * x + 1) * u * std::numbers::pi / (2.0 * kBlock));
      }
    }
    return c;
  }();
  return basis;
}

}  // namespace detail

/// Orthonormal 2-D DCT-II, rows then columns.
inline CoeffBlock dct8_forward(const SampleBlock& s) {
  const auto& c = detail::dct_basis();
  std::array<double, 64> tmp{};
  for (int r = 0; r < kBlock; ++r) {
    for (int v = 0; v < kBlock; ++v) {
      double acc = 0.0;
      for (int x = 0; x < kBlock; ++x) acc += c[v][x] * s(r, x);
      tmp[r * kBlock + v] = acc;
    }
  }
  CoeffBlock out;
  for (int u = 0; u < kBlock; ++u) {
    for (int v = 0; v < kBlock; ++v) {
      double acc = 0.0;
      for (int y = 0; y < kBlock; ++y) acc += c[u][y] * tmp[y * kBlock + v];
      out(u, v) = acc;
    }
  }
  return out;
}

/// Orthonormal 2-D DCT-III; the exact inverse of dct8_forward.
inline SampleBlock dct8_inverse(const CoeffBlock& f) {
  const auto& c = detail::dct_basis();
  std::array<double, 64> tmp{};
  for (int u = 0; u < kBlock; ++u) {
    for (int x = 0; x < kBlock; ++x) {
      double acc = 0.0;
      for (int v = 0; v < kBlock; ++v) acc += c[v][x] * f(u, v);
      tmp[u * kBlock + x] = acc;
    }
  }
  SampleBlock out;
  for (int y = 0; y < kBlock; ++y) {
    for (int x = 0; x < kBlock; ++x) {
      double acc = 0.0;
      for (int u = 0; u < kBlock; ++u) acc += c[u][y] * tmp[u * kBlock + x];
      out(y, x) = acc;
    }
  }
  return out;
}

/// JPEG zigzag traversal as (row, col) pairs, low to high frequency.
constexpr std::array<std::pair<int, int>, 64> zigzag_order() {
  std::array<std::pair<int, int>, 64> order{};
  std::size_t i = 0;
  for (int diag = 0; diag < 2 * kBlock - 1; ++diag) {
    const int lo = std::max(0, diag - (kBlock - 1));
    const int hi = std::min(diag, kBlock - 1);
    if (diag % 2 == 0) {
      for (int row = hi; row >= lo; --row) order[i++] = {row, diag - row};
    } else {
      for (int row = lo; row <= hi; ++row) order[i++] = {row, diag - row};
    }
  }
  return order;
}

/// Monotone curve on [0, 1] fixing both endpoints.
class MappingFunction {
 public:
  enum class Kind { Twisting, Eta, SCurve };

  static MappingFunction twisting() { return MappingFunction(Kind::Twisting, 1.0); }
  static MappingFunction eta(double exponent = 0.75) {
    if (!(exponent > 0.0) || !std::isfinite(exponent)) {
      throw Error(ErrorCode::InvalidArgument, "eta exponent must be positive");
    }
    return MappingFunction(Kind::Eta, exponent);
  }
  static MappingFunction s_curve() { return MappingFunction(Kind::SCurve, 1.0); }

  Kind kind() const noexcept { return kind_; }
  double exponent() const noexcept { return exponent_; }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::Twisting: return x * (2.0 - x);
      case Kind::Eta: return std::pow(x, exponent_);
      case Kind::SCurve: return x * x * (3.0 - 2.0 * x);
    }
    return x;
  }

  std::string name() const {
    switch (kind_) {
      case Kind::Twisting: return "twisting";
      case Kind::SCurve: return "s";
      case Kind::Eta: {
        std::string s = std::to_string(exponent_);
        s.erase(s.find_last_not_of('0') + 1);
        if (s.back() == '.') s.pop_back();
        return "eta:" + s;
      }
    }
    return "unknown";
  }

 private:
  MappingFunction(Kind kind, double exponent) : kind_(kind), exponent_(exponent) {}

  Kind kind_;
  double exponent_;
};

inline double mapping_eval(const MappingFunction& fn, double x) { return fn(x); }

struct DcMapping {
  double dc = 0.0;
  double lambda = 1.0;
};

/// Normalizes DC by 2040, applies the curve and reports the gain. Blocks with
/// DC <= 1e-6 are left untouched with gain 1.
inline DcMapping map_dc(double dc, const MappingFunction& fn) {
  if (dc <= kDcGuard) return {dc, 1.0};
  const double x = std::clamp(dc / kMaxDc, 0.0, 1.0);
  const double mapped = kMaxDc * fn(x);
  return {mapped, mapped / dc};
}

enum class EnhanceMode { Dc, DcAc, DcAcChroma };

constexpr std::string_view to_string(EnhanceMode m) {
  switch (m) {
    case EnhanceMode::Dc: return "dc";
    case EnhanceMode::DcAc: return "dc-ac";
    case EnhanceMode::DcAcChroma: return "dc-ac-chroma";
  }
  return "unknown";
}

/// Rewrites a luma coefficient block in place and returns the DC gain.
inline double enhance_luma_block(CoeffBlock& block, const MappingFunction& fn, EnhanceMode mode) {
  const DcMapping m = map_dc(block(0, 0), fn);
  block(0, 0) = m.dc;
  if (mode != EnhanceMode::Dc) {
    for (std::size_t i = 1; i < block.v.size(); ++i) block.v[i] *= m.lambda;
  }
  return m.lambda;
}

/// Scales chroma deviations from neutral by the luma gain clamped to [0.5, 2].
inline void scale_chroma_block(CoeffBlock& block, double luma_gain) {
  const double g = std::clamp(luma_gain, kChromaGainMin, kChromaGainMax);
  block(0, 0) = kNeutralChromaDc + g * (block(0, 0) - kNeutralChromaDc);
  for (std::size_t i = 1; i < block.v.size(); ++i) block.v[i] *= g;
}

/// A plane cut into 8x8 sample blocks, padded by edge replication.
struct BlockPartition {
  int orig_w = 0;
  int orig_h = 0;
  int padded_w = 0;
  int padded_h = 0;
  std::vector<SampleBlock> blocks;  // row-major over the block grid

  int cols() const noexcept { return padded_w / kBlock; }
  int rows() const noexcept { return padded_h / kBlock; }
};

inline BlockPartition partition_plane(std::span<const double> plane, int width, int height) {
  if (width < 1 || height < 1 || plane.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::DimensionMismatch, "plane size does not match dimensions");
  }
  BlockPartition p;
  p.orig_w = width;
  p.orig_h = height;
  p.padded_w = (width + kBlock - 1) / kBlock * kBlock;
  p.padded_h = (height + kBlock - 1) / kBlock * kBlock;
  p.blocks.resize(static_cast<std::size_t>(p.cols()) * p.rows());
  for (int by = 0; by < p.rows(); ++by) {
    for (int bx = 0; bx < p.cols(); ++bx) {
      auto& blk = p.blocks[static_cast<std::size_t>(by) * p.cols() + bx];
      for (int r = 0; r < kBlock; ++r) {
        const int y = std::min(by * kBlock + r, height - 1);
        for (int c = 0; c < kBlock; ++c) {
          const int x = std::min(bx * kBlock + c, width - 1);
          blk(r, c) = plane[static_cast<std::size_t>(y) * width + x];
        }
      }
    }
  }
  return p;
}

/// Reassembles the blocks and crops the padding.
inline std::vector<double> assemble_plane(const BlockPartition& p) {
  std::vector<double> plane(static_cast<std::size_t>(p.orig_w) * p.orig_h);
  for (int y = 0; y < p.orig_h; ++y) {
    for (int x = 0; x < p.orig_w; ++x) {
      const auto& blk = p.blocks[static_cast<std::size_t>(y / kBlock) * p.cols() + x / kBlock];
      plane[static_cast<std::size_t>(y) * p.orig_w + x] = blk(y % kBlock, x % kBlock);
    }
  }
  return plane;
}

/// Block-DCT enhancement on real YCbCr planes.
inline YccPlanes enhance_planes(const YccPlanes& in, const MappingFunction& fn, EnhanceMode mode) {
  BlockPartition y = partition_plane(in.y, in.width, in.height);
  BlockPartition cb;
  BlockPartition cr;
  const bool chroma = mode == EnhanceMode::DcAcChroma;
  if (chroma) {
    cb = partition_plane(in.cb, in.width, in.height);
    cr = partition_plane(in.cr, in.width, in.height);
  }
  for (std::size_t i = 0; i < y.blocks.size(); ++i) {
    CoeffBlock coeffs = dct8_forward(y.blocks[i]);
    const double gain = enhance_luma_block(coeffs, fn, mode);
    y.blocks[i] = dct8_inverse(coeffs);
    if (chroma) {
      for (auto* plane : {&cb, &cr}) {
        CoeffBlock c = dct8_forward(plane->blocks[i]);
        scale_chroma_block(c, gain);
        plane->blocks[i] = dct8_inverse(c);
      }
    }
  }
  YccPlanes out;
  out.width = in.width;
  out.height = in.height;
  out.y = assemble_plane(y);
  out.cb = chroma ? assemble_plane(cb) : in.cb;
  out.cr = chroma ? assemble_plane(cr) : in.cr;
  return out;
}

inline RgbImage enhance_color(const RgbImage& img, const MappingFunction& fn, EnhanceMode mode) {
  return ycbcr_to_rgb(enhance_planes(rgb_to_ycbcr(img), fn, mode));
}

}  // namespace lumen
