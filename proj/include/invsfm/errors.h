#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace invsfm {

enum class ErrorCode {
  kDegenerateConfiguration,
  kInvalidConfiguration,
  kRayOrthogonalToAxis,
  kInvalidLambda,
  kDegenerateCrossSection,
  kOrthogonalRays,
  kCollinearBaseRays,
  kSingularFocalFactor,
  kVariantMismatch,
  kLengthMismatch,
  kEvaluationError,
  kNonFiniteResidual,
  kInsufficientData,
  kDegenerateTargets,
  kPointBehindCamera,
  kParseError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can branch on the kind of failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace invsfm
