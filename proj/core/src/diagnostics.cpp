#include "qkinetic/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qkinetic/error.hpp"
#include "qkinetic/norms.hpp"

namespace qkinetic {

namespace {

void require_shape(const DistributionField& F, const EquilibriumTables& tables, const VelocityGrid& vgrid,
                   const SpatialGrid& xgrid) {
  if (F.n_v() != vgrid.size() || tables.size() != vgrid.size() || F.n_x() != xgrid.size())
    throw Error(ErrorCode::InconsistentShape, "field, tables and grids disagree in size");
}

double measure(const VelocityGrid& vgrid, const SpatialGrid& xgrid) {
  return vgrid.cell_weight() * xgrid.cell_volume();
}

}  // namespace

DefectMoments defect_moments(const DistributionField& F, const EquilibriumTables& tables, const VelocityGrid& vgrid,
                             const SpatialGrid& xgrid) {
  require_shape(F, tables, vgrid, xgrid);
  DefectMoments m;
  for (std::size_t x = 0; x < F.n_x(); ++x) {
    for (std::size_t v = 0; v < F.n_v(); ++v) {
      const double d = F(x, v) - tables.mu[v];
      const Vec3& c = vgrid.node(v);
      m.mass += d;
      m.momentum = m.momentum + c * d;
      m.energy += d * c.norm2();
    }
  }
  const double w = measure(vgrid, xgrid);
  m.mass *= w;
  m.momentum = m.momentum * w;
  m.energy *= w;
  return m;
}

double entropy_density(double F, double delta) noexcept {
  const double first = F > 0.0 ? F * std::log(F) : 0.0;
  if (delta < 1e-8) return first - F + 0.5 * delta * F * F;
  const double g = 1.0 - delta * F;
  const double second = g > 0.0 ? g * std::log1p(-delta * F) / delta : 0.0;
  return first + second;
}

double entropy_H(const DistributionField& F, const EquilibriumTables& tables, const VelocityGrid& vgrid,
                 const SpatialGrid& xgrid, double tol) {
  require_shape(F, tables, vgrid, xgrid);
  F.require_admissible("entropy_H", tol);
  const double hi = F.upper_bound();
  std::vector<double> eta_mu(vgrid.size());
  for (std::size_t v = 0; v < vgrid.size(); ++v) eta_mu[v] = entropy_density(tables.mu[v], tables.delta);
  double sum = 0.0;
  for (std::size_t x = 0; x < F.n_x(); ++x)
    for (std::size_t v = 0; v < F.n_v(); ++v)
      sum += entropy_density(std::clamp(F(x, v), 0.0, hi), tables.delta) - eta_mu[v];
  return sum * measure(vgrid, xgrid);
}

double e_functional(const DistributionField& F, const DefectMoments& initial, const EquilibriumTables& tables,
                    const VelocityGrid& vgrid, const SpatialGrid& xgrid) {
  return entropy_H(F, tables, vgrid, xgrid) + std::log(tables.rho) * initial.mass + 0.5 * initial.energy;
}

double e_functional(const DistributionField& F0, const EquilibriumTables& tables, const VelocityGrid& vgrid,
                    const SpatialGrid& xgrid) {
  return e_functional(F0, defect_moments(F0, tables, vgrid, xgrid), tables, vgrid, xgrid);
}

double taylor_defect(const DistributionField& F, const EquilibriumTables& tables, const VelocityGrid& vgrid,
                     const SpatialGrid& xgrid) {
  require_shape(F, tables, vgrid, xgrid);
  double sum = 0.0;
  for (std::size_t x = 0; x < F.n_x(); ++x) {
    for (std::size_t v = 0; v < F.n_v(); ++v) {
      const double mu = tables.mu[v];
      const double d = std::abs(F(x, v) - mu);
      sum += d <= mu ? d * d / (4.0 * mu) : 0.25 * d;
    }
  }
  return sum * measure(vgrid, xgrid);
}

DiagnosticsRecord compute_record(double time, const DistributionField& F, const DefectMoments& initial,
                                 const EquilibriumTables& tables, const VelocityGrid& vgrid,
                                 const SpatialGrid& xgrid, double beta, std::size_t clamp_events) {
  DiagnosticsRecord r;
  r.time = time;
  const DefectMoments m = defect_moments(F, tables, vgrid, xgrid);
  r.mass_defect = m.mass;
  r.momentum_defect = m.momentum;
  r.energy_defect = m.energy;
  r.entropy = entropy_H(F, tables, vgrid, xgrid);
  r.e_functional = r.entropy + std::log(tables.rho) * initial.mass + 0.5 * initial.energy;
  r.taylor_defect = taylor_defect(F, tables, vgrid, xgrid);
  const PerturbationField f = to_perturbation(F, tables);
  r.sup_norm = weighted_sup_norm(f, vgrid, beta);
  r.l1v_norm = linf_x_l1_v_norm(f, vgrid);
  const auto values = F.data().values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  r.f_min = *lo;
  r.f_max = *hi;
  r.clamp_events = clamp_events;
  return r;
}

std::string diagnostics_csv_header() {
  return "time,mass_defect,momentum_defect_x,momentum_defect_y,momentum_defect_z,energy_defect,entropy,"
         "e_functional,taylor_defect,sup_norm,l1v_norm,f_min,f_max,clamp_events";
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu",
                r.time, r.mass_defect, r.momentum_defect.x, r.momentum_defect.y, r.momentum_defect.z,
                r.energy_defect, r.entropy, r.e_functional, r.taylor_defect, r.sup_norm, r.l1v_norm, r.f_min,
                r.f_max, r.clamp_events);
  return buf;
}

double c_beta(double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidParameter, "beta must be positive");
  const double r = 0.5 * (-1.0 + std::sqrt(1.0 + 8.0 * beta));
  return std::pow(1.0 + r, beta) * std::exp(-0.25 * r * r);
}

double PhiSpec::operator()(double x, double length) const noexcept {
  if (kind == Kind::Constant) return value;
  return 1.0 + amplitude * std::cos(2.0 * std::numbers::pi * x / length);
}

double phi_budget(const PhiSpec& phi, const SpatialGrid& xgrid) {
  const double length = xgrid.length();
  auto integrand = [&](double x) {
    const double p = phi(x, length);
    return std::abs(p * std::log(p)) + std::abs(p - 1.0);
  };
  if (phi.kind == PhiSpec::Kind::Constant) return length * integrand(0.0);
  // |phi - 1| and phi ln phi change sign where cos vanishes; split there.
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  const double breaks[] = {0.0, 0.25 * length, 0.75 * length, length};
  for (int i = 0; i < 3; ++i)
    total += gauss_kronrod<double, 61>::integrate(integrand, breaks[i], breaks[i + 1], 15, 1e-14);
  return total;
}

ExampleData make_example_data(const PhiSpec& phi, const ModelParams& params, const EquilibriumTables& tables,
                              const SpatialGrid& xgrid) {
  params.validate();
  const double length = xgrid.length();
  AdmissibilityReport rep;
  rep.phi_min = std::numeric_limits<double>::infinity();
  rep.phi_max = -std::numeric_limits<double>::infinity();
  std::vector<double> phi_nodes(xgrid.size());
  for (std::size_t i = 0; i < xgrid.size(); ++i) {
    const double p = phi(xgrid.position(i), length);
    phi_nodes[i] = p;
    rep.phi_min = std::min(rep.phi_min, p);
    rep.phi_max = std::max(rep.phi_max, p);
  }
  // Analytic extremes of the profile, not only the sampled ones.
  if (phi.kind == PhiSpec::Kind::Cosine) {
    rep.phi_min = std::min(rep.phi_min, 1.0 - std::abs(phi.amplitude));
    rep.phi_max = std::max(rep.phi_max, 1.0 + std::abs(phi.amplitude));
  }
  if (!(rep.phi_min > 0.0)) throw Error(ErrorCode::InvalidParameter, "phi must be positive everywhere");

  const double cb = c_beta(params.beta);
  const double big_m = phi.big_m.value_or(cb / std::sqrt(params.rho));
  const double quantum_cap = params.delta > 0.0 ? 1.0 + params.rho / params.delta
                                                : std::numeric_limits<double>::infinity();
  rep.cap = std::min(quantum_cap, 1.0 + big_m * std::sqrt(params.rho) / cb);
  rep.budget = phi_budget(phi, xgrid);
  rep.epsilon = phi.epsilon;
  rep.within_cap = rep.phi_max <= rep.cap;
  rep.within_budget = rep.budget <= rep.epsilon;
  rep.admissible = rep.within_cap && rep.within_budget;

  DistributionField F(xgrid.size(), tables.size(), tables.delta);
  for (std::size_t x = 0; x < xgrid.size(); ++x)
    for (std::size_t v = 0; v < tables.size(); ++v) F(x, v) = phi_nodes[x] * tables.mu[v];
  return {std::move(F), rep};
}

DistributionField make_bump_data(const BumpSpec& bump, const EquilibriumTables& tables, const VelocityGrid& vgrid,
                                 const SpatialGrid& xgrid) {
  if (!(bump.width > 0.0)) throw Error(ErrorCode::InvalidParameter, "bump width must be positive");
  DistributionField F(xgrid.size(), vgrid.size(), tables.delta);
  for (std::size_t x = 0; x < xgrid.size(); ++x) {
    const double mod =
        1.0 + bump.modulation * std::cos(2.0 * std::numbers::pi * xgrid.position(x) / xgrid.length());
    for (std::size_t v = 0; v < vgrid.size(); ++v) {
      const double r2 = (vgrid.node(v) - bump.centre).norm2();
      F(x, v) = tables.mu[v] + bump.amplitude * mod * std::exp(-0.5 * r2 / (bump.width * bump.width));
    }
  }
  F.require_admissible("bump initial data");
  return F;
}

}  // namespace qkinetic
