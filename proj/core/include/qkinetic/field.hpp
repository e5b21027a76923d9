#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkinetic/params.hpp"

namespace qkinetic {

/// Dense array over (x-node, v-node), stored x-major.
class PhaseSpaceArray {
 public:
  PhaseSpaceArray() = default;
  PhaseSpaceArray(std::size_t n_x, std::size_t n_v, double fill = 0.0)
      : n_x_(n_x), n_v_(n_v), values_(n_x * n_v, fill) {}

  [[nodiscard]] std::size_t n_x() const noexcept { return n_x_; }
  [[nodiscard]] std::size_t n_v() const noexcept { return n_v_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  double& operator()(std::size_t x, std::size_t v) noexcept { return values_[x * n_v_ + v]; }
  double operator()(std::size_t x, std::size_t v) const noexcept { return values_[x * n_v_ + v]; }

  [[nodiscard]] std::span<double> at_x(std::size_t x) noexcept { return {values_.data() + x * n_v_, n_v_}; }
  [[nodiscard]] std::span<const double> at_x(std::size_t x) const noexcept {
    return {values_.data() + x * n_v_, n_v_};
  }

  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  [[nodiscard]] bool same_shape(const PhaseSpaceArray& other) const noexcept {
    return n_x_ == other.n_x_ && n_v_ == other.n_v_;
  }

  /// Throws Error(NonFiniteValue) on the first NaN/inf.
  void require_finite(std::string_view what) const;

 private:
  std::size_t n_x_ = 0;
  std::size_t n_v_ = 0;
  std::vector<double> values_;
};

/// Perturbation f in F = mu + sqrt(mu_bar) f.
using PerturbationField = PhaseSpaceArray;

struct BoundViolation {
  std::size_t x_node;
  std::size_t v_node;
  double value;
  double lower;
  double upper;

  [[nodiscard]] std::string describe() const;
};

/// Distribution function F(x, v) with the Pauli bound 0 <= F <= 1/delta.
class DistributionField {
 public:
  DistributionField(std::size_t n_x, std::size_t n_v, double delta, double fill = 0.0)
      : data_(n_x, n_v, fill), delta_(delta) {}
  DistributionField(PhaseSpaceArray data, double delta) : data_(std::move(data)), delta_(delta) {}

  [[nodiscard]] double delta() const noexcept { return delta_; }
  [[nodiscard]] double upper_bound() const noexcept;

  [[nodiscard]] PhaseSpaceArray& data() noexcept { return data_; }
  [[nodiscard]] const PhaseSpaceArray& data() const noexcept { return data_; }

  [[nodiscard]] std::size_t n_x() const noexcept { return data_.n_x(); }
  [[nodiscard]] std::size_t n_v() const noexcept { return data_.n_v(); }
  double& operator()(std::size_t x, std::size_t v) noexcept { return data_(x, v); }
  double operator()(std::size_t x, std::size_t v) const noexcept { return data_(x, v); }
  [[nodiscard]] std::span<const double> at_x(std::size_t x) const noexcept { return data_.at_x(x); }
  [[nodiscard]] std::span<double> at_x(std::size_t x) noexcept { return data_.at_x(x); }

  /// First node outside [-tol, 1/delta + tol] (or non-finite), scanning in
  /// storage order.
  [[nodiscard]] std::optional<BoundViolation> first_violation(double tol = 0.0) const;

  /// Throws Error(BoundViolation) describing the first offending node.
  void require_admissible(std::string_view what, double tol = 0.0) const;

  /// Clamps into [0, 1/delta]; returns the number of clamped nodes and
  /// accumulates the largest clamp magnitude.
  std::size_t clamp(double* max_magnitude = nullptr);

 private:
  PhaseSpaceArray data_;
  double delta_;
};

}  // namespace qkinetic
