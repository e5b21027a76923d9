#pragma once

namespace qkinetic {

/// Smooth cutoff chi_m: 1 on [0, m], 0 on [2m, inf), cosine ramp between.
struct CutoffSpec {
  double m = 0.5;
};

double chi_m(double tau, const CutoffSpec& spec) noexcept;

}  // namespace qkinetic
