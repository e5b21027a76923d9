#include "qkinetic/cutoff.hpp"

#include <cmath>
#include <numbers>

namespace qkinetic {

double chi_m(double tau, const CutoffSpec& spec) noexcept {
  const double m = spec.m;
  if (tau <= m) return 1.0;
  if (tau >= 2.0 * m) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (tau - m) / m));
}

}  // namespace qkinetic
