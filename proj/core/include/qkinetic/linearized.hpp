#pragma once

#include <memory>
#include <vector>

#include "qkinetic/collision.hpp"
#include "qkinetic/cutoff.hpp"

namespace qkinetic {

struct LinearizedOptions {
  /// Negates the third bracket of K_delta. Only for mutation tests of the
  /// decomposition check; never set in production runs.
  bool flip_third_k_term = false;
};

/// L_delta = nu_delta - K_delta and the cutoff splitting K = K^m + K^c.
class LinearizedOperator {
 public:
  LinearizedOperator(const CollisionOperator& op, CutoffSpec cutoff, LinearizedOptions options = {});

  [[nodiscard]] const CollisionOperator& collision() const noexcept { return *op_; }
  [[nodiscard]] const CutoffSpec& cutoff() const noexcept { return cutoff_; }
  [[nodiscard]] const CollisionWorkspace& cutoff_workspace() const noexcept { return *cutoff_ws_; }

  [[nodiscard]] std::vector<double> apply_K_delta(const PerturbationField& f, std::size_t x) const;
  [[nodiscard]] std::vector<double> apply_K_m(const PerturbationField& f, std::size_t x) const;
  /// K_delta - K^m, computed as a difference so the splitting is exact.
  [[nodiscard]] std::vector<double> apply_K_c(const PerturbationField& f, std::size_t x) const;
  [[nodiscard]] std::vector<double> apply_L_delta(const PerturbationField& f, std::size_t x) const;

  [[nodiscard]] const std::vector<double>& nu() const noexcept { return op_->nu(); }

  /// max_v |C(mu + sqrt(mu_bar) f) - sqrt(mu_bar) (Gamma f - L f)| / scale,
  /// where scale is the loss-integral size of the collision evaluation.
  [[nodiscard]] double decomposition_residual(const PerturbationField& f, std::size_t x) const;

 private:
  const CollisionOperator* op_;
  CutoffSpec cutoff_;
  LinearizedOptions options_;
  std::shared_ptr<const CollisionWorkspace> cutoff_ws_;
};

}  // namespace qkinetic
