#include "divsamp/error.hpp"

namespace divsamp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kUnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::kSlotOutOfRange: return "SlotOutOfRange";
    case ErrorCode::kNotInitialized: return "NotInitialized";
    case ErrorCode::kInsufficientFrames: return "InsufficientFrames";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kEmptyReferenceSet: return "EmptyReferenceSet";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kTailTooLong: return "TailTooLong";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kCsvParse: return "CsvParse";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

bool is_io_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kBadMagic:
    case ErrorCode::kTruncatedPayload:
    case ErrorCode::kCsvParse:
    case ErrorCode::kIo:
    case ErrorCode::kNonFiniteValue:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kIndexOutOfRange:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace divsamp
