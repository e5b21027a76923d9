#include "qkinetic/error.hpp"

namespace qkinetic {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::EvenNodeCount: return "EvenNodeCount";
    case ErrorCode::NonPositiveSize: return "NonPositiveSize";
    case ErrorCode::OddAzimuthCount: return "OddAzimuthCount";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::BoundViolation: return "BoundViolation";
    case ErrorCode::InconsistentShape: return "InconsistentShape";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace qkinetic
