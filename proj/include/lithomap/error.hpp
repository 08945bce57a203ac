#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lithomap {

/// Failure categories raised by the library. Each maps to a stable CLI exit
/// code through exit_code().
enum class ErrorCode {
  // input errors (exit 2)
  LengthMismatch,
  OutOfRangeBand,
  MalformedHeader,
  SizeMismatch,
  UnsupportedDataType,
  IoFailure,
  MissingEsun,
  SunBelowHorizon,
  EmptyLibrary,
  NonMonotonicWavelengths,
  RangeOutOfBounds,
  GridMismatch,
  SiteOutsideRaster,
  SiteOnNonSoilPixel,
  InvalidConfig,
  InvalidSpec,
  // pipeline preconditions (exit 3)
  AlreadyReflectance,
  TooFewPixels,
  DegenerateCurve,
  EmptyClass,
  EmptySubclass,
  EmptyBand,
  // numerical failures (exit 4)
  ZeroVector,
  ZeroVariance,
  RankDeficient,
  SingularScatter,
  DegenerateRepresentatives,
  IdenticalEndmembers,
};

std::string_view error_name(ErrorCode code);

/// 2 = input error, 3 = precondition violated, 4 = numerical failure.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  /// The message without the leading error name.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace lithomap
