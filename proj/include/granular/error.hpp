#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace granular {

enum class Errc {
  InvalidDimension,
  OddResolution,
  AliasingViolation,
  InvalidParameter,
  SymmetryViolation,
  RootNotBracketed,
  DimensionMismatch,
  InvalidOrder,
  UnsupportedDesignSize,
  GridMismatch,
  MissingEnergy,
  MemoryBudgetExceeded,
  NonFiniteState,
  DegenerateDensity,
  ElasticWithBath,
  TooLargeForPairwiseSum,
  InsufficientSamples,
  EmptyWindow,
  SchemaError,
  ConstraintError,
  CorruptSnapshot,
  IoError,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidDimension: return "InvalidDimension";
    case Errc::OddResolution: return "OddResolution";
    case Errc::AliasingViolation: return "AliasingViolation";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::SymmetryViolation: return "SymmetryViolation";
    case Errc::RootNotBracketed: return "RootNotBracketed";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidOrder: return "InvalidOrder";
    case Errc::UnsupportedDesignSize: return "UnsupportedDesignSize";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::MissingEnergy: return "MissingEnergy";
    case Errc::MemoryBudgetExceeded: return "MemoryBudgetExceeded";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::DegenerateDensity: return "DegenerateDensity";
    case Errc::ElasticWithBath: return "ElasticWithBath";
    case Errc::TooLargeForPairwiseSum: return "TooLargeForPairwiseSum";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::EmptyWindow: return "EmptyWindow";
    case Errc::SchemaError: return "SchemaError";
    case Errc::ConstraintError: return "ConstraintError";
    case Errc::CorruptSnapshot: return "CorruptSnapshot";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace granular
