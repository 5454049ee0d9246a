#pragma once

// Raster images, binary PNM (P5/P6, maxval 255) I/O and JFIF YCbCr conversion.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "lumen/error.hpp"

namespace lumen {

/// Rounds half away from zero and saturates to the 8-bit range.
inline std::uint8_t quantize(double v) {
  const double r = std::round(v);
  if (!(r > 0.0)) return 0;  // also maps NaN to 0
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

/// Row-major interleaved 8-bit raster with `Channels` samples per pixel.
template <int Channels>
class Image {
  static_assert(Channels == 1 || Channels == 3);

 public:
  static constexpr int channels = Channels;

  Image(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(sample_count(), fill);
  }

  Image(int width, int height, std::vector<std::uint8_t> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != sample_count()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "sample buffer has " + std::to_string(data_.size()) + " entries, expected " +
                      std::to_string(sample_count()));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  std::size_t sample_count() const noexcept { return pixel_count() * Channels; }

  std::span<const std::uint8_t> samples() const noexcept { return data_; }
  std::span<std::uint8_t> samples() noexcept { return data_; }

  std::uint8_t operator()(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }
  std::uint8_t& operator()(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive, got " +
                                                  std::to_string(width) + "x" +
                                                  std::to_string(height));
    }
  }

  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * Channels + static_cast<std::size_t>(c);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

using GrayImage = Image<1>;
using RgbImage = Image<3>;
using AnyImage = std::variant<GrayImage, RgbImage>;

/// Real-valued, unclamped Y/Cb/Cr planes (full-range JFIF, chroma neutral at 128).
struct YccPlanes {
  int width = 0;
  int height = 0;
  std::vector<double> y;
  std::vector<double> cb;
  std::vector<double> cr;
};

namespace detail {

class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments; returns false if nothing was skipped.
  bool skip_separators() {
    const std::size_t start = pos_;
    while (pos_ < bytes_.size()) {
      const auto ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (is_space(ch)) {
        ++pos_;
      } else {
        break;
      }
    }
    return pos_ != start;
  }

  // Parses a decimal integer field; returns -1 when the field is not numeric.
  long long read_uint() {
    long long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      if (value > 100'000'000) return -1;  // absurd sizes are rejected as malformed
      value = value * 10 + (bytes_[pos_] - '0');
      ++pos_;
      ++digits;
    }
    if (digits == 0) return -1;
    return value;
  }

  bool consume_single_space() {
    if (pos_ < bytes_.size() && is_space(bytes_[pos_])) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::size_t position() const noexcept { return pos_; }

 private:
  static bool is_space(std::uint8_t ch) {
    return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' || ch == '\f';
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

template <int Channels>
void append_pnm(std::vector<std::uint8_t>& out, const Image<Channels>& image) {
  const std::string header = std::string(Channels == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  out.insert(out.end(), header.begin(), header.end());
  const auto samples = image.samples();
  out.insert(out.end(), samples.begin(), samples.end());
}

}  // namespace detail

/// Decodes a binary P5 or P6 file with maxval 255.
inline AnyImage read_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(ErrorCode::BadMagic, "expected P5 or P6 magic");
  }
  const bool gray = bytes[1] == '5';

  detail::PnmHeaderReader reader(bytes);
  long long fields[3] = {0, 0, 0};
  for (auto& field : fields) {
    if (!reader.skip_separators()) throw Error(ErrorCode::BadHeader, "missing separator in header");
    field = reader.read_uint();
    if (field < 0) throw Error(ErrorCode::BadHeader, "non-numeric header field");
  }
  const long long width = fields[0];
  const long long height = fields[1];
  const long long maxval = fields[2];
  if (width <= 0 || height <= 0) throw Error(ErrorCode::BadHeader, "nonpositive dimensions");
  if (maxval != 255) {
    throw Error(ErrorCode::UnsupportedMaxval, "maxval " + std::to_string(maxval) + " is not 255");
  }
  if (!reader.consume_single_space()) {
    throw Error(ErrorCode::BadHeader, "missing whitespace after maxval");
  }

  const std::size_t channels = gray ? 1 : 3;
  const auto needed = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
  const std::size_t available = bytes.size() - reader.position();
  if (available < needed) {
    throw Error(ErrorCode::Truncated, "payload has " + std::to_string(available) +
                                          " bytes, expected " + std::to_string(needed));
  }
  const auto payload = bytes.subspan(reader.position(), needed);
  std::vector<std::uint8_t> data(payload.begin(), payload.end());
  if (gray) return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
  return RgbImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

/// Canonical encoding: magic, "\n", "<w> <h>", "\n", "255", "\n", raw samples.
template <int Channels>
std::vector<std::uint8_t> write_pnm(const Image<Channels>& image) {
  std::vector<std::uint8_t> out;
  out.reserve(image.sample_count() + 32);
  detail::append_pnm(out, image);
  return out;
}

inline std::vector<std::uint8_t> write_pnm(const AnyImage& image) {
  return std::visit([](const auto& img) { return write_pnm(img); }, image);
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "read failed for " + path.string());
  return bytes;
}

/// Writes to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot create " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::Io, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename into " + path.string());
  }
}

inline AnyImage load_pnm(const std::filesystem::path& path) { return read_pnm(read_file(path)); }

template <class ImageT>
ImageT load_pnm_as(const std::filesystem::path& path) {
  auto any = load_pnm(path);
  if (auto* img = std::get_if<ImageT>(&any)) return std::move(*img);
  throw Error(ErrorCode::BadMagic, path.string() + (ImageT::channels == 1
                                                        ? " is not a P5 (grayscale) file"
                                                        : " is not a P6 (color) file"));
}

template <int Channels>
void save_pnm(const std::filesystem::path& path, const Image<Channels>& image) {
  write_file_atomic(path, write_pnm(image));
}

// JFIF full-range conversion.

inline YccPlanes rgb_to_ycbcr(const RgbImage& img) {
  YccPlanes p;
  p.width = img.width();
  p.height = img.height();
  const std::size_t n = img.pixel_count();
  p.y.resize(n);
  p.cb.resize(n);
  p.cr.resize(n);
  const auto s = img.samples();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = s[3 * i];
    const double g = s[3 * i + 1];
    const double b = s[3 * i + 2];
    // Rows of the JFIF matrix rearranged around G (luma row sums to 1, chroma
    // rows to 0) so that R=G=B lands exactly on (v, 128, 128).
    p.y[i] = g + 0.299 * (r - g) + 0.114 * (b - g);
    p.cb[i] = 0.5 * (b - g) - 0.168736 * (r - g) + 128.0;
    p.cr[i] = 0.5 * (r - g) - 0.081312 * (b - g) + 128.0;
  }
  return p;
}

inline RgbImage ycbcr_to_rgb(const YccPlanes& p) {
  RgbImage img(p.width, p.height);
  const std::size_t n = img.pixel_count();
  if (p.y.size() != n || p.cb.size() != n || p.cr.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "YCbCr plane sizes do not match dimensions");
  }
  auto s = img.samples();
  for (std::size_t i = 0; i < n; ++i) {
    const double y = p.y[i];
    const double cb = p.cb[i] - 128.0;
    const double cr = p.cr[i] - 128.0;
    s[3 * i] = quantize(y + 1.402 * cr);
    s[3 * i + 1] = quantize(y - 0.344136 * cb - 0.714136 * cr);
    s[3 * i + 2] = quantize(y + 1.772 * cb);
  }
  return img;
}

/// Luma of the JFIF transform, rounded to 8 bits.
inline GrayImage luminance(const RgbImage& img) {
  GrayImage out(img.width(), img.height());
  const auto s = img.samples();
  auto o = out.samples();
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    o[i] = quantize(0.299 * s[3 * i] + 0.587 * s[3 * i + 1] + 0.114 * s[3 * i + 2]);
  }
  return out;
}

}  // namespace lumen
