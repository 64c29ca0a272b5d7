#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace potmap {

enum class ErrorCode {
  SingularMetric,
  SignatureMismatch,
  OutOfDomain,
  BadMode,
  SkewViolation,
  DegreeOverflow,
  DegreeUnderflow,
  MissingField,
  NotResolvable,
  NotIntegrable,
  StepUnstable,
  IndefiniteParameterMetric,
  Diverged,
  CriticalPoint,
  ParseError,
  ConfigError,
  IOError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-readable code so the
// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace potmap
