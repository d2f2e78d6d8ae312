#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace codesum {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kKernelTooLong,
  kNonFinite,
  kUnbalancedBraces,
  kEmptyCorpus,
  kEmptyTrainingSet,
  kEmptyIndex,
  kVariantDisabled,
  kBadMagic,
  kUnsupportedVersion,
  kCorruptManifest,
  kTruncatedPayload,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// All library failures surface as this one exception type; callers switch on
// code() when they need to tell failure modes apart.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace codesum
