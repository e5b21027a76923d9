#pragma once

#include <string_view>

namespace qkinetic {

enum class DomainMode { Homogeneous, Torus1D };

DomainMode parse_domain_mode(std::string_view name);
std::string_view to_string(DomainMode mode) noexcept;

/// Angular part b(theta) of the collision kernel. Only the |cos theta| law
/// is supported; the coefficient scales it.
struct AngularLaw {
  double coefficient = 1.0;

  [[nodiscard]] double operator()(double cos_theta) const noexcept {
    return coefficient * (cos_theta < 0.0 ? -cos_theta : cos_theta);
  }
};

/// Physical and quantum parameters of one problem instance.
struct ModelParams {
  double delta = 1.0;  ///< quantum parameter in [0, 1]
  double rho = 1.0;    ///< equilibrium scale, > 0
  double gamma = -1.0; ///< soft-potential exponent in (-3, 0)
  double beta = 7.0;   ///< velocity weight exponent, > 0
  AngularLaw angular_law{};
  DomainMode domain_mode = DomainMode::Homogeneous;

  /// Throws Error(InvalidParameter) when an invariant is violated.
  void validate() const;

  /// Pauli cap 1/delta; +infinity in the classical case.
  [[nodiscard]] double upper_bound() const noexcept;
};

}  // namespace qkinetic
