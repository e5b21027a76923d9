#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "qkinetic/collision_workspace.hpp"
#include "qkinetic/equilibrium.hpp"
#include "qkinetic/field.hpp"
#include "qkinetic/grid.hpp"
#include "qkinetic/parallel.hpp"
#include "qkinetic/params.hpp"

namespace qkinetic {

struct PostCollision {
  Vec3 v_prime;
  Vec3 u_prime;
};

/// v' = v - [(v - u).w] w, u' = u + [(v - u).w] w.
PostCollision post_collision(const Vec3& v, const Vec3& u, const Vec3& omega) noexcept;

struct CollisionOptions {
  std::size_t kernel_cache_bytes = CollisionWorkspace::kDefaultCacheBytes;
  unsigned threads = 1;
  /// Project collision_operator output onto the complement of {1, v, |v|^2}.
  bool conservative_fix = false;
};

/// Gain term and damping rate of a splitting C = gain - damping * state.
struct CollisionRates {
  std::vector<double> gain;
  std::vector<double> damping;
};

/// Sums over the lattice of values * (1, v_x, v_y, v_z, |v|^2) * h^3.
using MomentVector = std::array<double, 5>;
MomentVector velocity_moments(std::span<const double> values, const VelocityGrid& grid);

/// Subtracts weight(v) * sum_j lambda_j psi_j(v) from `values`, with lambda
/// chosen so that a field with the given moments would end up with zero
/// moments.
void remove_moments(std::span<double> values, const MomentVector& moments, std::span<const double> weight,
                    const VelocityGrid& grid);

/// Weighted orthogonal projection of `values` onto fields with vanishing
/// moments: remove_moments(values, velocity_moments(values), weight).
void conservative_projection(std::span<double> values, std::span<const double> weight, const VelocityGrid& grid);

/// Quadrature of the quantum collision operator and everything built from
/// the same integrand: the two gain/damping splittings, the collision
/// frequency, the linear gain operator K, and the nonlinear remainder.
///
/// F at post-collision points is mu(w) + sqrt(mu_bar)(w) trilinear(f)(w),
/// clamped to [0, 1/delta], where f = (F - mu) / sqrt(mu_bar) is extended by
/// zero outside the box. Perturbation inputs f use the same stencil.
class CollisionOperator {
 public:
  CollisionOperator(const ModelParams& params, const VelocityGrid& grid, const SphereQuadrature& sphere,
                    CollisionOptions options = {});

  [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
  [[nodiscard]] const VelocityGrid& grid() const noexcept { return workspace_->grid(); }
  [[nodiscard]] const EquilibriumTables& tables() const noexcept { return tables_; }
  [[nodiscard]] const CollisionWorkspace& workspace() const noexcept { return *workspace_; }
  [[nodiscard]] std::shared_ptr<const CollisionWorkspace> shared_workspace() const noexcept { return workspace_; }
  [[nodiscard]] const SphereQuadrature& sphere() const noexcept { return sphere_; }
  [[nodiscard]] const CollisionOptions& options() const noexcept { return options_; }

  /// C_delta(F)(v) at every v-node of x-node `x`. When `scale` is given it
  /// receives max_v of the loss integral, the natural size of the output.
  [[nodiscard]] std::vector<double> evaluate(const DistributionField& F, std::size_t x,
                                             double* scale = nullptr) const;
  /// Same quadrature, never projected.
  [[nodiscard]] std::vector<double> evaluate_raw(const DistributionField& F, std::size_t x,
                                                 double* scale = nullptr) const;

  /// gain = C~_1(F), damping = g_1(F); C = gain - damping * F.
  [[nodiscard]] CollisionRates gain_and_damping(const DistributionField& F, std::size_t x) const;

  /// gain = C~_2(G), damping = g_2; -delta C = gain - damping * G with G = 1 - delta F.
  [[nodiscard]] CollisionRates companion_gain_and_damping(const DistributionField& F, std::size_t x) const;

  /// Both splittings from a single sweep (companion left empty if not wanted).
  void rates(const DistributionField& F, std::size_t x, CollisionRates& primary, CollisionRates* companion) const;

  /// nu_delta at every node (computed once at construction).
  [[nodiscard]] const std::vector<double>& nu() const noexcept { return nu_; }
  [[nodiscard]] double nu_delta(std::size_t v_node) const { return nu_.at(v_node); }

  /// K_delta f with an arbitrary workspace (the cutoff variant shares the
  /// grid). `flip_third` negates the third bracket (mutation-test hook).
  [[nodiscard]] std::vector<double> apply_gain_operator(std::span<const double> f, const CollisionWorkspace& ws,
                                                        bool flip_third = false) const;

  /// Gamma_delta(f), the ten-term nonlinear remainder.
  [[nodiscard]] std::vector<double> gamma_delta(std::span<const double> f) const;
  /// Gamma_{delta+}(f), its four-term positive part.
  [[nodiscard]] std::vector<double> gamma_delta_plus(std::span<const double> f) const;

  [[nodiscard]] std::vector<double> gamma_delta(const PerturbationField& f, std::size_t x) const {
    return gamma_delta(f.at_x(x));
  }
  [[nodiscard]] std::vector<double> gamma_delta_plus(const PerturbationField& f, std::size_t x) const {
    return gamma_delta_plus(f.at_x(x));
  }

 private:
  void require_state(const DistributionField& F, std::size_t x) const;

  ModelParams params_;
  CollisionOptions options_;
  SphereQuadrature sphere_;
  std::shared_ptr<const CollisionWorkspace> workspace_;
  EquilibriumTables tables_;
  std::vector<double> nu_;
};

}  // namespace qkinetic
