#pragma once

#include <stdexcept>
#include <string>

namespace modkit {

/// Failure modes across the library. Each code belongs to one category,
/// which determines the CLI exit code (input 2, degenerate data 3,
/// internal 4).
enum class ErrorCode {
  // data_model
  DegenerateSplit,
  UnknownFactor,
  UnknownCategory,
  EmptyStratum,
  ZeroRowSum,
  InvalidDataset,
  // info_theory
  UnknownAxis,
  OverlappingAxes,
  EmptyAxisSet,
  SubsetSearchTooLarge,
  CellCapExceeded,
  InvalidPmf,
  // forest
  EmptyNode,
  SingleSample,
  NoFeatures,
  DimensionMismatch,
  // evaluation
  EmptyLabels,
  LengthMismatch,
  Empty,
  SingleClassStratum,
  // feature_importance
  UnknownFeature,
  BadSubsetSize,
  // synthgen
  InvalidSpec,
  // io
  Io,
  HeaderMissing,
  ParseError,
  NegativeFeature,
  MissingValue,
  SchemaMismatch,
  SerializationError,
  // catch-all for broken internal invariants
  InternalError,
};

enum class ErrorCategory { Input, DegenerateData, Internal };

constexpr ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateSplit:
    case ErrorCode::EmptyStratum:
    case ErrorCode::ZeroRowSum:
    case ErrorCode::SingleSample:
    case ErrorCode::NoFeatures:
    case ErrorCode::EmptyLabels:
    case ErrorCode::Empty:
    case ErrorCode::EmptyNode:
    case ErrorCode::SingleClassStratum:
      return ErrorCategory::DegenerateData;
    case ErrorCode::LengthMismatch:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InternalError:
      return ErrorCategory::Internal;
    default:
      return ErrorCategory::Input;
  }
}

constexpr int exit_code_of(ErrorCategory cat) noexcept {
  switch (cat) {
    case ErrorCategory::Input: return 2;
    case ErrorCategory::DegenerateData: return 3;
    case ErrorCategory::Internal: return 4;
  }
  return 4;
}

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace modkit
