#pragma once

// Flat grayscale morphology with square structuring elements.
//
// Windows are intersected with the image domain, which is the same as padding
// with +inf for erosion and -inf for dilation.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "lumen/error.hpp"
#include "lumen/pixelbuf.hpp"

namespace lumen {

/// Square window of side 2*mu+1 centred on the origin. mu = 0 is the identity window.
class StructuringElement {
 public:
  constexpr explicit StructuringElement(int mu) : mu_(mu) {
    if (mu < 0) throw Error(ErrorCode::InvalidArgument, "structuring element scale must be >= 0");
  }

  constexpr int mu() const noexcept { return mu_; }
  constexpr int side() const noexcept { return 2 * mu_ + 1; }

 private:
  int mu_;
};

namespace detail {

// Separable running extremum; exact because window∩domain is a rectangle.
template <class Pick>
GrayImage window_filter(const GrayImage& f, StructuringElement se, Pick pick) {
  const int mu = se.mu();
  if (mu == 0) return f;
  const int w = f.width();
  const int h = f.height();

  GrayImage tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - mu);
      const int x1 = std::min(w - 1, x + mu);
      std::uint8_t v = f(x0, y);
      for (int xx = x0 + 1; xx <= x1; ++xx) v = pick(v, f(xx, y));
      tmp(x, y) = v;
    }
  }

  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - mu);
    const int y1 = std::min(h - 1, y + mu);
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = tmp(x, y0);
      for (int yy = y0 + 1; yy <= y1; ++yy) v = pick(v, tmp(x, yy));
      out(x, y) = v;
    }
  }
  return out;
}

struct MinOf {
  std::uint8_t operator()(std::uint8_t a, std::uint8_t b) const noexcept { return std::min(a, b); }
};
struct MaxOf {
  std::uint8_t operator()(std::uint8_t a, std::uint8_t b) const noexcept { return std::max(a, b); }
};

}  // namespace detail

inline GrayImage erode(const GrayImage& f, StructuringElement se) {
  return detail::window_filter(f, se, detail::MinOf{});
}

inline GrayImage dilate(const GrayImage& f, StructuringElement se) {
  return detail::window_filter(f, se, detail::MaxOf{});
}

inline GrayImage open(const GrayImage& f, StructuringElement se) { return dilate(erode(f, se), se); }

inline GrayImage close(const GrayImage& f, StructuringElement se) { return erode(dilate(f, se), se); }

/// Geodesic reconstruction by dilation of `marker` under `mask` (8-connected).
///
/// Produces the fixpoint of g <- min(dilate(g, 1), mask) starting at g = marker,
/// computed with the hybrid raster-scan + FIFO algorithm.
inline GrayImage reconstruct_by_dilation(const GrayImage& marker, const GrayImage& mask) {
  if (!marker.same_shape(mask)) {
    throw Error(ErrorCode::DimensionMismatch, "marker and mask dimensions differ");
  }
  const auto mk = marker.samples();
  const auto ms = mask.samples();
  for (std::size_t i = 0; i < mk.size(); ++i) {
    if (mk[i] > ms[i]) {
      throw Error(ErrorCode::MarkerExceedsMask,
                  "marker exceeds mask at pixel " + std::to_string(i));
    }
  }

  const int w = mask.width();
  const int h = mask.height();
  GrayImage g = marker;
  auto inside = [w, h](int x, int y) { return x >= 0 && x < w && y >= 0 && y < h; };

  // Forward raster pass over the causal half-neighbourhood.
  static constexpr int kPrev[4][2] = {{-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = g(x, y);
      for (const auto& d : kPrev) {
        if (inside(x + d[0], y + d[1])) v = std::max(v, g(x + d[0], y + d[1]));
      }
      g(x, y) = std::min(v, mask(x, y));
    }
  }

  // Backward pass; pixels that can still propagate seed the queue.
  static constexpr int kNext[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  std::deque<std::pair<int, int>> fifo;
  for (int y = h - 1; y >= 0; --y) {
    for (int x = w - 1; x >= 0; --x) {
      std::uint8_t v = g(x, y);
      for (const auto& d : kNext) {
        if (inside(x + d[0], y + d[1])) v = std::max(v, g(x + d[0], y + d[1]));
      }
      const std::uint8_t gp = std::min(v, mask(x, y));
      g(x, y) = gp;
      for (const auto& d : kNext) {
        const int qx = x + d[0];
        const int qy = y + d[1];
        if (inside(qx, qy) && g(qx, qy) < gp && g(qx, qy) < mask(qx, qy)) {
          fifo.emplace_back(x, y);
          break;
        }
      }
    }
  }

  while (!fifo.empty()) {
    const auto [x, y] = fifo.front();
    fifo.pop_front();
    const std::uint8_t gp = g(x, y);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int qx = x + dx;
        const int qy = y + dy;
        if ((dx == 0 && dy == 0) || !inside(qx, qy)) continue;
        if (g(qx, qy) < gp && g(qx, qy) != mask(qx, qy)) {
          g(qx, qy) = std::min(gp, mask(qx, qy));
          fifo.emplace_back(qx, qy);
        }
      }
    }
  }
  return g;
}

/// Reconstruction of f from its erosion: drops bright structures narrower than
/// the element and restores the surviving ones at their original height.
inline GrayImage opening_by_reconstruction(const GrayImage& f, StructuringElement se) {
  return reconstruct_by_dilation(erode(f, se), f);
}

}  // namespace lumen
