#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace divsamp {

enum class ErrorCode {
  kDimensionMismatch,
  kNonFiniteValue,
  kDegenerateData,
  kUnsupportedDimension,
  kSlotOutOfRange,
  kNotInitialized,
  kInsufficientFrames,
  kTooFewPoints,
  kEmptyReferenceSet,
  kIndexOutOfRange,
  kTailTooLong,
  kInvalidConfig,
  kBadMagic,
  kTruncatedPayload,
  kCsvParse,
  kIo,
};

std::string_view to_string(ErrorCode code) noexcept;

// True for errors caused by malformed input files or failed IO, as opposed to
// bad parameters or misuse.
bool is_io_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace divsamp
