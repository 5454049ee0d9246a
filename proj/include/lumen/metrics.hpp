#pragma once

// Image quality metrics: SSIM, Shannon entropy, Weber contrast, opponent-channel
// colorfulness (CEF) and the no-reference JPEG quality score (JPQM).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "lumen/error.hpp"
#include "lumen/pixelbuf.hpp"

namespace lumen {

enum class Metric { Ssim, Entropy, NormalizedEntropy, Jpqm, Cef, Colorfulness, WeberContrast };

constexpr std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Ssim: return "ssim";
    case Metric::Entropy: return "entropy";
    case Metric::NormalizedEntropy: return "normalized_entropy";
    case Metric::Jpqm: return "jpqm";
    case Metric::Cef: return "cef";
    case Metric::Colorfulness: return "colorfulness";
    case Metric::WeberContrast: return "weber_contrast";
  }
  return "unknown";
}

/// Scores for one image pair. Only requested metrics are present; a requested
/// metric whose guard failed is listed in `errors` instead.
struct MetricsReport {
  std::optional<double> ssim;
  std::optional<double> entropy_bits;
  std::optional<double> normalized_entropy;
  std::optional<double> jpqm;
  std::optional<double> cef;
  std::optional<double> weber_c;
  std::vector<std::pair<Metric, ErrorCode>> errors;

  std::optional<double> get(Metric m) const {
    switch (m) {
      case Metric::Ssim: return ssim;
      case Metric::Entropy: return entropy_bits;
      case Metric::NormalizedEntropy: return normalized_entropy;
      case Metric::Jpqm: return jpqm;
      case Metric::Cef: return cef;
      case Metric::Colorfulness: return std::nullopt;
      case Metric::WeberContrast: return weber_c;
    }
    return std::nullopt;
  }

  std::optional<ErrorCode> error(Metric m) const {
    for (const auto& [metric, code] : errors) {
      if (metric == m) return code;
    }
    return std::nullopt;
  }
};

namespace detail {

// Neumaier compensated sum, fixed order.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Summed-area table with a zero guard row/column.
class IntegralTable {
 public:
  template <class Value>
  IntegralTable(int w, int h, Value value) : w_(w), table_((w + 1) * static_cast<std::size_t>(h + 1), 0) {
    for (int y = 0; y < h; ++y) {
      std::int64_t row = 0;
      for (int x = 0; x < w; ++x) {
        row += value(x, y);
        at(x + 1, y + 1) = at(x + 1, y) + row;
      }
    }
  }

  std::int64_t box(int x, int y, int bw, int bh) const {
    return at(x + bw, y + bh) - at(x, y + bh) - at(x + bw, y) + at(x, y);
  }

 private:
  std::int64_t& at(int x, int y) { return table_[static_cast<std::size_t>(y) * (w_ + 1) + x]; }
  std::int64_t at(int x, int y) const { return table_[static_cast<std::size_t>(y) * (w_ + 1) + x]; }

  int w_;
  std::vector<std::int64_t> table_;
};

}  // namespace detail

inline constexpr int kSsimWindow = 8;
inline constexpr double kSsimC1 = (0.01 * 255.0) * (0.01 * 255.0);
inline constexpr double kSsimC2 = (0.03 * 255.0) * (0.03 * 255.0);

/// Mean SSIM over all 8x8 windows at stride 1, uniform weights and population
/// statistics. Window moments are accumulated in integers, so the result is
/// symmetric in its arguments and ssim(x, x) is exactly 1.
inline double ssim(const GrayImage& x, const GrayImage& y) {
  if (!x.same_shape(y)) throw Error(ErrorCode::DimensionMismatch, "ssim inputs differ in size");
  if (x.width() < kSsimWindow || x.height() < kSsimWindow) {
    throw Error(ErrorCode::TooSmall, "ssim needs at least 8x8 pixels");
  }
  const int w = x.width();
  const int h = x.height();
  auto px = [&](int i, int j) { return std::int64_t{x(i, j)}; };
  auto py = [&](int i, int j) { return std::int64_t{y(i, j)}; };
  const detail::IntegralTable sx(w, h, px);
  const detail::IntegralTable sy(w, h, py);
  const detail::IntegralTable sxx(w, h, [&](int i, int j) { return px(i, j) * px(i, j); });
  const detail::IntegralTable syy(w, h, [&](int i, int j) { return py(i, j) * py(i, j); });
  const detail::IntegralTable sxy(w, h, [&](int i, int j) { return px(i, j) * py(i, j); });

  constexpr std::int64_t n = kSsimWindow * kSsimWindow;
  constexpr double n2 = static_cast<double>(n * n);
  detail::CompensatedSum total;
  for (int j = 0; j + kSsimWindow <= h; ++j) {
    for (int i = 0; i + kSsimWindow <= w; ++i) {
      const std::int64_t a = sx.box(i, j, kSsimWindow, kSsimWindow);
      const std::int64_t b = sy.box(i, j, kSsimWindow, kSsimWindow);
      const double mx = static_cast<double>(a) / n;
      const double my = static_cast<double>(b) / n;
      const double vx = static_cast<double>(n * sxx.box(i, j, kSsimWindow, kSsimWindow) - a * a) / n2;
      const double vy = static_cast<double>(n * syy.box(i, j, kSsimWindow, kSsimWindow) - b * b) / n2;
      const double cxy = static_cast<double>(n * sxy.box(i, j, kSsimWindow, kSsimWindow) - a * b) / n2;
      const double num = (2.0 * (mx * my) + kSsimC1) * (2.0 * cxy + kSsimC2);
      const double den = (mx * mx + my * my + kSsimC1) * (vx + vy + kSsimC2);
      total.add(num / den);
    }
  }
  const auto windows = static_cast<double>(w - kSsimWindow + 1) * static_cast<double>(h - kSsimWindow + 1);
  return total.value() / windows;
}

inline std::array<std::size_t, 256> histogram(const GrayImage& f) {
  std::array<std::size_t, 256> hist{};
  for (const auto v : f.samples()) ++hist[v];
  return hist;
}

/// Shannon entropy in bits of the 256-bin gray-level histogram.
inline double entropy(const GrayImage& f) {
  const auto hist = histogram(f);
  const double n = static_cast<double>(f.pixel_count());
  double h = 0.0;
  for (const auto count : hist) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;  // no -0.0
}

inline double normalized_entropy(const GrayImage& original, const GrayImage& treated) {
  const double ref = entropy(original);
  if (ref <= 0.0) {
    throw Error(ErrorCode::ZeroReferenceEntropy, "reference image has a single gray level");
  }
  return entropy(treated) / ref;
}

/// (L_max - L_min) / L_min over a set of luminance samples.
inline double weber_contrast(std::span<const std::uint8_t> region) {
  if (region.empty()) throw Error(ErrorCode::InvalidArgument, "empty region");
  const auto [lo, hi] = std::minmax_element(region.begin(), region.end());
  if (*lo == 0) throw Error(ErrorCode::ZeroMinimum, "minimum luminance is zero");
  return static_cast<double>(*hi - *lo) / static_cast<double>(*lo);
}

inline double weber_contrast(const GrayImage& f) { return weber_contrast(f.samples()); }

/// Opponent-channel colorfulness: sqrt(var_rg + var_yb) + 0.3 sqrt(mean_rg^2 + mean_yb^2).
inline double colorfulness(const RgbImage& img) {
  const auto s = img.samples();
  const std::size_t n = img.pixel_count();
  detail::CompensatedSum sum_rg;
  detail::CompensatedSum sum_yb;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = s[3 * i];
    const double g = s[3 * i + 1];
    const double b = s[3 * i + 2];
    sum_rg.add(r - g);
    sum_yb.add(0.5 * (r + g) - b);
  }
  const double mean_rg = sum_rg.value() / static_cast<double>(n);
  const double mean_yb = sum_yb.value() / static_cast<double>(n);
  detail::CompensatedSum ss_rg;
  detail::CompensatedSum ss_yb;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = s[3 * i];
    const double g = s[3 * i + 1];
    const double b = s[3 * i + 2];
    const double drg = (r - g) - mean_rg;
    const double dyb = (0.5 * (r + g) - b) - mean_yb;
    ss_rg.add(drg * drg);
    ss_yb.add(dyb * dyb);
  }
  const double var_rg = ss_rg.value() / static_cast<double>(n);
  const double var_yb = ss_yb.value() / static_cast<double>(n);
  return std::sqrt(var_rg + var_yb) + 0.3 * std::sqrt(mean_rg * mean_rg + mean_yb * mean_yb);
}

/// Colorfulness enhancement factor.
inline double cef(const RgbImage& original, const RgbImage& enhanced) {
  const double ref = colorfulness(original);
  if (!(ref > 0.0)) throw Error(ErrorCode::AchromaticReference, "reference image has no color");
  return colorfulness(enhanced) / ref;
}

// JPQM model constants (blockiness, activity and zero-crossing exponents).
inline constexpr double kJpqmAlpha = -245.9;
inline constexpr double kJpqmBeta = 261.9;
inline constexpr double kJpqmGamma1 = -0.0240;
inline constexpr double kJpqmGamma2 = 0.0160;
inline constexpr double kJpqmGamma3 = 0.0064;
inline constexpr double kJpqmFloor = 1e-8;
inline constexpr int kJpqmMinSide = 17;

/// Blockiness, activity and zero-crossing rate along one orientation.
struct JpqmFeatures {
  double blockiness = 0.0;
  double activity = 0.0;
  double zero_crossing = 0.0;
};

namespace detail {

// `at(line, k)` reads sample k along a line; lines run across the orientation.
template <class At>
JpqmFeatures jpqm_features(int lines, int length, At at) {
  detail::CompensatedSum all;
  detail::CompensatedSum boundary;
  std::size_t boundary_count = 0;
  std::size_t crossings = 0;
  const int last_boundary = 8 * (length / 8 - 1);
  for (int m = 0; m < lines; ++m) {
    int prev = 0;
    for (int k = 0; k + 1 < length; ++k) {
      const int d = at(m, k + 1) - at(m, k);
      all.add(std::abs(d));
      // The difference across the 8-pixel grid: between samples 8j-1 and 8j.
      if ((k + 1) % 8 == 0 && k + 1 <= last_boundary) {
        boundary.add(std::abs(d));
        ++boundary_count;
      }
      if (k > 0 && ((prev < 0 && d > 0) || (prev > 0 && d < 0))) ++crossings;
      prev = d;
    }
  }
  JpqmFeatures out;
  const double diffs = static_cast<double>(lines) * (length - 1);
  out.blockiness = boundary.value() / static_cast<double>(boundary_count);
  out.activity = (8.0 * all.value() / diffs - out.blockiness) / 7.0;
  out.zero_crossing = static_cast<double>(crossings) / (static_cast<double>(lines) * (length - 2));
  return out;
}

}  // namespace detail

inline JpqmFeatures jpqm_horizontal(const GrayImage& f) {
  return detail::jpqm_features(f.height(), f.width(),
                               [&](int m, int k) { return static_cast<int>(f(k, m)); });
}

inline JpqmFeatures jpqm_vertical(const GrayImage& f) {
  return detail::jpqm_features(f.width(), f.height(),
                               [&](int m, int k) { return static_cast<int>(f(m, k)); });
}

/// No-reference JPEG quality score; higher means fewer visible 8x8 block artifacts.
inline double jpqm(const GrayImage& f) {
  if (f.width() < kJpqmMinSide || f.height() < kJpqmMinSide) {
    throw Error(ErrorCode::TooSmall, "jpqm needs at least 17x17 pixels");
  }
  const auto hz = jpqm_horizontal(f);
  const auto vt = jpqm_vertical(f);
  const double b = std::max((hz.blockiness + vt.blockiness) / 2.0, kJpqmFloor);
  const double a = std::max((hz.activity + vt.activity) / 2.0, kJpqmFloor);
  const double z = std::max((hz.zero_crossing + vt.zero_crossing) / 2.0, kJpqmFloor);
  return kJpqmAlpha + kJpqmBeta * std::pow(b, kJpqmGamma1) * std::pow(a, kJpqmGamma2) *
                          std::pow(z, kJpqmGamma3);
}

}  // namespace lumen
