#include "camwsol/error.hpp"

namespace camwsol {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::HeaderShapeMismatch: return "HeaderShapeMismatch";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::InvalidTensor: return "InvalidTensor";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DanglingTensorRef: return "DanglingTensorRef";
    case ErrorCode::OverlappingSplits: return "OverlappingSplits";
    case ErrorCode::BoxOutOfBounds: return "BoxOutOfBounds";
    case ErrorCode::ClassOutOfRange: return "ClassOutOfRange";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::DegenerateStack: return "DegenerateStack";
    case ErrorCode::TauOutOfRange: return "TauOutOfRange";
    case ErrorCode::MissingHeatmap: return "MissingHeatmap";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::AllZeroContribution: return "AllZeroContribution";
    case ErrorCode::NegativeContribution: return "NegativeContribution";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace camwsol
