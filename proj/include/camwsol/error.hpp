#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace camwsol {

enum class ErrorCode {
  // tensor container
  IoError,
  BadMagic,
  MalformedHeader,
  UnsupportedDtype,
  HeaderShapeMismatch,
  NonFiniteData,
  InvalidTensor,
  // manifest
  SchemaError,
  DanglingTensorRef,
  OverlappingSplits,
  BoxOutOfBounds,
  // computation
  ClassOutOfRange,
  EmptySelection,
  DegenerateStack,
  TauOutOfRange,
  MissingHeatmap,
  EmptySplit,
  AllZeroContribution,
  NegativeContribution,
  InsufficientSamples,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries exactly one ErrorCode.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace camwsol
