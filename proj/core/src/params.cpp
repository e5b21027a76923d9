#include "qkinetic/params.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qkinetic/error.hpp"

namespace qkinetic {

DomainMode parse_domain_mode(std::string_view name) {
  if (name == "homogeneous") return DomainMode::Homogeneous;
  if (name == "torus1d") return DomainMode::Torus1D;
  throw Error(ErrorCode::InvalidParameter, "unknown domain_mode '" + std::string(name) + "'");
}

std::string_view to_string(DomainMode mode) noexcept {
  return mode == DomainMode::Homogeneous ? "homogeneous" : "torus1d";
}

void ModelParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidParameter, msg); };
  if (!(delta >= 0.0 && delta <= 1.0)) fail("delta must lie in [0, 1], got " + std::to_string(delta));
  if (!(rho > 0.0) || !std::isfinite(rho)) fail("rho must be positive, got " + std::to_string(rho));
  if (!(gamma > -3.0 && gamma < 0.0)) fail("gamma must lie in (-3, 0), got " + std::to_string(gamma));
  if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta must be positive, got " + std::to_string(beta));
  if (!(angular_law.coefficient >= 0.0) || !std::isfinite(angular_law.coefficient))
    fail("angular coefficient must be non-negative");
}

double ModelParams::upper_bound() const noexcept {
  return delta > 0.0 ? 1.0 / delta : std::numeric_limits<double>::infinity();
}

}  // namespace qkinetic
