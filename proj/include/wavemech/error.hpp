#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavemech {

enum class ErrorCode {
  InvalidArgument,
  AllZeroField,
  LoopThroughNode,
  NonPeriodicGrid,
  CausticDetected,
  NumericalBlowup,
  NodeRegion,
  LeftDomain,
  ZeroDensity,
  InsufficientSnapshots,
  ZeroNorm,
  NodeInSuperposition,
  ZeroOverlap,
  DegenerateInterval,
  BasisViolation,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AllZeroField: return "AllZeroField";
    case ErrorCode::LoopThroughNode: return "LoopThroughNode";
    case ErrorCode::NonPeriodicGrid: return "NonPeriodicGrid";
    case ErrorCode::CausticDetected: return "CausticDetected";
    case ErrorCode::NumericalBlowup: return "NumericalBlowup";
    case ErrorCode::NodeRegion: return "NodeRegion";
    case ErrorCode::LeftDomain: return "LeftDomain";
    case ErrorCode::ZeroDensity: return "ZeroDensity";
    case ErrorCode::InsufficientSnapshots: return "InsufficientSnapshots";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::NodeInSuperposition: return "NodeInSuperposition";
    case ErrorCode::ZeroOverlap: return "ZeroOverlap";
    case ErrorCode::DegenerateInterval: return "DegenerateInterval";
    case ErrorCode::BasisViolation: return "BasisViolation";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace wavemech
