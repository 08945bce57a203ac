#include "lithomap/error.hpp"

namespace lithomap {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::OutOfRangeBand: return "OutOfRangeBand";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::UnsupportedDataType: return "UnsupportedDataType";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::MissingEsun: return "MissingEsun";
    case ErrorCode::SunBelowHorizon: return "SunBelowHorizon";
    case ErrorCode::EmptyLibrary: return "EmptyLibrary";
    case ErrorCode::NonMonotonicWavelengths: return "NonMonotonicWavelengths";
    case ErrorCode::RangeOutOfBounds: return "RangeOutOfBounds";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SiteOutsideRaster: return "SiteOutsideRaster";
    case ErrorCode::SiteOnNonSoilPixel: return "SiteOnNonSoilPixel";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::AlreadyReflectance: return "AlreadyReflectance";
    case ErrorCode::TooFewPixels: return "TooFewPixels";
    case ErrorCode::DegenerateCurve: return "DegenerateCurve";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::EmptySubclass: return "EmptySubclass";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularScatter: return "SingularScatter";
    case ErrorCode::DegenerateRepresentatives: return "DegenerateRepresentatives";
    case ErrorCode::IdenticalEndmembers: return "IdenticalEndmembers";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::AlreadyReflectance:
    case ErrorCode::TooFewPixels:
    case ErrorCode::DegenerateCurve:
    case ErrorCode::EmptyClass:
    case ErrorCode::EmptySubclass:
    case ErrorCode::EmptyBand:
      return 3;
    case ErrorCode::ZeroVector:
    case ErrorCode::ZeroVariance:
    case ErrorCode::RankDeficient:
    case ErrorCode::SingularScatter:
    case ErrorCode::DegenerateRepresentatives:
    case ErrorCode::IdenticalEndmembers:
      return 4;
    default:
      return 2;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code), message_(message) {}

}  // namespace lithomap
