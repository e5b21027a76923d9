#pragma once

#include <vector>

#include "qkinetic/field.hpp"
#include "qkinetic/grid.hpp"
#include "qkinetic/params.hpp"

namespace qkinetic {

/// mu_{delta,rho}(v) = 1 / (delta + rho exp(|v|^2 / 2)).
double eval_mu(const Vec3& v, double delta, double rho);
/// Same, from |v|^2.
double eval_mu_from_speed2(double speed2, double delta, double rho);

/// sqrt(mu (1 - delta mu)) = sqrt(rho) exp(|v|^2/4) / (delta + rho exp(|v|^2/2)).
double eval_mu_bar_sqrt(const Vec3& v, double delta, double rho);
double eval_mu_bar_sqrt_from_speed2(double speed2, double delta, double rho);

/// Maxwellian comparison state exp(-|v|^2 / 2).
double eval_mu0(const Vec3& v);

/// Closed-form rho-dependent constants of the equilibrium bounds and the
/// local-existence horizon.
struct RhoConstants {
  double c1;  ///< rho^2 / (rho + 1)^3
  double c2;  ///< (rho + 1) / rho^2
  double c3;  ///< sqrt(rho) (rho + 1) / rho^2
  double c4;  ///< c3 / rho
  double c5;  ///< c2 + c3 + c4
};

RhoConstants rho_constants(double rho);

/// Node tables of the equilibrium family on a velocity grid.
struct EquilibriumTables {
  double delta;
  double rho;
  std::vector<double> mu;
  std::vector<double> mu_bar_sqrt;
  std::vector<double> mu0;
  std::vector<double> w_beta;

  [[nodiscard]] std::size_t size() const noexcept { return mu.size(); }
};

EquilibriumTables build_tables(const VelocityGrid& grid, const ModelParams& params);

/// F(x, v) = mu(v) at every node.
DistributionField equilibrium_field(const EquilibriumTables& tables, std::size_t n_x);

/// f = (F - mu) / sqrt(mu_bar).
PerturbationField to_perturbation(const DistributionField& F, const EquilibriumTables& tables);
/// F = mu + sqrt(mu_bar) f (no clamping, no admissibility check).
DistributionField from_perturbation(const PerturbationField& f, const EquilibriumTables& tables);

}  // namespace qkinetic
