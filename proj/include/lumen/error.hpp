#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lumen {

enum class ErrorCode {
  BadMagic,
  BadHeader,
  UnsupportedMaxval,
  Truncated,
  DimensionMismatch,
  MarkerExceedsMask,
  BadBlockSize,
  InvalidArgument,
  TooSmall,
  ZeroReferenceEntropy,
  ZeroMinimum,
  AchromaticReference,
  Io,
};

// Stable kebab-case names; the CLI prints these in ERROR cells.
constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic: return "bad-magic";
    case ErrorCode::BadHeader: return "bad-header";
    case ErrorCode::UnsupportedMaxval: return "unsupported-maxval";
    case ErrorCode::Truncated: return "truncated";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::MarkerExceedsMask: return "marker-exceeds-mask";
    case ErrorCode::BadBlockSize: return "bad-block-size";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::TooSmall: return "too-small";
    case ErrorCode::ZeroReferenceEntropy: return "zero-reference-entropy";
    case ErrorCode::ZeroMinimum: return "zero-minimum";
    case ErrorCode::AchromaticReference: return "achromatic-reference";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace lumen
