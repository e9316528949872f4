#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lqg {

enum class ErrorCode {
  InvalidArgument,
  CoincidentPoints,
  OutOfDomain,
  BoundaryTooClose,
  DegenerateAngle,
  InvalidCutoff,
  DimensionMismatch,
  GammaOutOfRange,
  DeltaOutOfRange,
  ResolutionTooCoarse,
  InsufficientHits,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::BoundaryTooClose: return "BoundaryTooClose";
    case ErrorCode::DegenerateAngle: return "DegenerateAngle";
    case ErrorCode::InvalidCutoff: return "InvalidCutoff";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::InsufficientHits: return "InsufficientHits";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code; every module reports failures through it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace lqg
