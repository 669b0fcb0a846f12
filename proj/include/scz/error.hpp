#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scz {

enum class ErrorCode {
  kInvalidInput,
  kNonDivisible,
  kInvalidContainer,
  kUnsupportedVersion,
  kCorruptStream,
  kAlphabetOverflow,
  kNormalizeError,
  kPrecisionTooSmall,
  kUncodableSymbol,
  kNoFeasibleReshape,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kNonDivisible: return "NonDivisible";
    case ErrorCode::kInvalidContainer: return "InvalidContainer";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kCorruptStream: return "CorruptStream";
    case ErrorCode::kAlphabetOverflow: return "AlphabetOverflow";
    case ErrorCode::kNormalizeError: return "NormalizeError";
    case ErrorCode::kPrecisionTooSmall: return "PrecisionTooSmall";
    case ErrorCode::kUncodableSymbol: return "UncodableSymbol";
    case ErrorCode::kNoFeasibleReshape: return "NoFeasibleReshape";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code, so
/// callers (and the CLI's exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace scz
