#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "qkinetic/equilibrium.hpp"
#include "qkinetic/field.hpp"
#include "qkinetic/grid.hpp"
#include "qkinetic/params.hpp"

namespace qkinetic {

/// Integrals over (x, v) of (F - mu) times 1, v and |v|^2.
struct DefectMoments {
  double mass = 0.0;
  Vec3 momentum{};
  double energy = 0.0;
};

DefectMoments defect_moments(const DistributionField& F, const EquilibriumTables& tables, const VelocityGrid& vgrid,
                             const SpatialGrid& xgrid);

/// eta(F) = F log F + (1/delta)(1 - delta F) log(1 - delta F), with
/// 0 log 0 = 0. Below delta = 1e-8 the second term uses its expansion
/// -F + delta F^2 / 2.
double entropy_density(double F, double delta) noexcept;

/// Integral of eta(F) - eta(mu). Rejects F outside [0, 1/delta] beyond `tol`.
double entropy_H(const DistributionField& F, const EquilibriumTables& tables, const VelocityGrid& vgrid,
                 const SpatialGrid& xgrid, double tol = 1e-12);

/// H(F) + log(rho) M0 + E0 / 2, with (M0, E0) the defects of `initial`.
double e_functional(const DistributionField& F, const DefectMoments& initial, const EquilibriumTables& tables,
                    const VelocityGrid& vgrid, const SpatialGrid& xgrid);

/// E evaluated at the initial datum itself.
double e_functional(const DistributionField& F0, const EquilibriumTables& tables, const VelocityGrid& vgrid,
                    const SpatialGrid& xgrid);

/// Integral of |F - mu|^2 / (4 mu) where |F - mu| <= mu and |F - mu| / 4 elsewhere.
double taylor_defect(const DistributionField& F, const EquilibriumTables& tables, const VelocityGrid& vgrid,
                     const SpatialGrid& xgrid);

struct DiagnosticsRecord {
  double time = 0.0;
  double mass_defect = 0.0;
  Vec3 momentum_defect{};
  double energy_defect = 0.0;
  double entropy = 0.0;
  double e_functional = 0.0;
  double taylor_defect = 0.0;
  double sup_norm = 0.0;
  double l1v_norm = 0.0;
  double f_min = 0.0;
  double f_max = 0.0;
  std::size_t clamp_events = 0;
};

DiagnosticsRecord compute_record(double time, const DistributionField& F, const DefectMoments& initial,
                                 const EquilibriumTables& tables, const VelocityGrid& vgrid,
                                 const SpatialGrid& xgrid, double beta, std::size_t clamp_events = 0);

/// CSV header and row in DiagnosticsRecord field order.
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& record);

/// C_beta = sup_v (1 + |v|)^beta e^{-|v|^2 / 4}.
double c_beta(double beta);

struct PhiSpec {
  enum class Kind { Constant, Cosine };
  Kind kind = Kind::Constant;
  double value = 1.0;      ///< Constant: phi = value
  double amplitude = 0.0;  ///< Cosine: phi = 1 + amplitude cos(2 pi x / L)
  /// Large-amplitude constant M of the admissible set; defaults to C_beta / sqrt(rho).
  std::optional<double> big_m;
  double epsilon = 1.0;  ///< budget threshold of the admissible set

  [[nodiscard]] double operator()(double x, double length) const noexcept;
};

struct AdmissibilityReport {
  double cap = 0.0;      ///< min{1 + rho/delta, 1 + M sqrt(rho) / C_beta}
  double phi_min = 0.0;
  double phi_max = 0.0;
  double budget = 0.0;   ///< ||phi ln phi||_{L1} + ||phi - 1||_{L1}
  double epsilon = 0.0;
  bool within_cap = false;
  bool within_budget = false;
  bool admissible = false;
};

/// ||phi ln phi||_{L1_x} + ||phi - 1||_{L1_x} over the spatial domain
/// (length 1 in homogeneous mode), by adaptive Gauss-Kronrod.
double phi_budget(const PhiSpec& phi, const SpatialGrid& xgrid);

struct ExampleData {
  DistributionField field;
  AdmissibilityReport report;
};

/// F0(x, v) = phi(x) mu(v) and the admissibility report for phi.
ExampleData make_example_data(const PhiSpec& phi, const ModelParams& params, const EquilibriumTables& tables,
                              const SpatialGrid& xgrid);

/// Gaussian bump on top of the equilibrium:
/// F0 = mu(v) + amplitude exp(-|v - centre|^2 / (2 width^2)) (1 + modulation cos(2 pi x / L)).
struct BumpSpec {
  double amplitude = 0.1;
  Vec3 centre{1.0, 0.0, 0.0};
  double width = 1.0;
  double modulation = 0.0;
};

DistributionField make_bump_data(const BumpSpec& bump, const EquilibriumTables& tables, const VelocityGrid& vgrid,
                                 const SpatialGrid& xgrid);

}  // namespace qkinetic
