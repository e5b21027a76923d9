#include "qkinetic/field.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qkinetic/error.hpp"

namespace qkinetic {

void PhaseSpaceArray::require_finite(std::string_view what) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::ostringstream os;
      os << what << ": non-finite value at x-node " << i / n_v_ << ", v-node " << i % n_v_;
      throw Error(ErrorCode::NonFiniteValue, os.str());
    }
  }
}

std::string BoundViolation::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "value " << value << " at x-node " << x_node << ", v-node " << v_node << " outside [" << lower << ", "
     << upper << "]";
  return os.str();
}

double DistributionField::upper_bound() const noexcept {
  return delta_ > 0.0 ? 1.0 / delta_ : std::numeric_limits<double>::infinity();
}

std::optional<BoundViolation> DistributionField::first_violation(double tol) const {
  const double hi = upper_bound();
  const auto values = data_.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = values[i];
    if (!(f >= -tol && f <= hi + tol))
      return BoundViolation{i / data_.n_v(), i % data_.n_v(), f, 0.0, hi};
  }
  return std::nullopt;
}

void DistributionField::require_admissible(std::string_view what, double tol) const {
  if (auto v = first_violation(tol)) {
    const ErrorCode code = std::isfinite(v->value) ? ErrorCode::BoundViolation : ErrorCode::NonFiniteValue;
    throw Error(code, std::string(what) + ": " + v->describe());
  }
}

std::size_t DistributionField::clamp(double* max_magnitude) {
  const double hi = upper_bound();
  std::size_t count = 0;
  for (double& f : data_.values()) {
    double c = f;
    if (f < 0.0) c = 0.0;
    else if (f > hi) c = hi;
    if (c != f) {
      ++count;
      if (max_magnitude != nullptr) *max_magnitude = std::max(*max_magnitude, std::abs(c - f));
      f = c;
    }
  }
  return count;
}

}  // namespace qkinetic
