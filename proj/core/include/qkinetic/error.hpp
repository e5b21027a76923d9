#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qkinetic {

enum class ErrorCode {
  InvalidParameter,
  EvenNodeCount,
  NonPositiveSize,
  OddAzimuthCount,
  NonFiniteValue,
  BoundViolation,
  InconsistentShape,
  NegativeRate,
  ConvergenceFailure,
  NotApplicable,
  Io,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every error raised by the library. Carries a
/// machine-readable code next to the human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qkinetic
