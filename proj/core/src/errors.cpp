#include "potmap/errors.hpp"

namespace potmap {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::BadMode: return "BadMode";
    case ErrorCode::SkewViolation: return "SkewViolation";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::DegreeUnderflow: return "DegreeUnderflow";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::NotResolvable: return "NotResolvable";
    case ErrorCode::NotIntegrable: return "NotIntegrable";
    case ErrorCode::StepUnstable: return "StepUnstable";
    case ErrorCode::IndefiniteParameterMetric: return "IndefiniteParameterMetric";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::CriticalPoint: return "CriticalPoint";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace potmap
