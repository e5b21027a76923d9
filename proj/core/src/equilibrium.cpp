#include "qkinetic/equilibrium.hpp"

#include <cmath>

#include "qkinetic/error.hpp"
#include "qkinetic/norms.hpp"

namespace qkinetic {

namespace {

// exp(-|v|^2/2) / rho underflows long before 1/(delta + rho e^{|v|^2/2})
// loses precision, so the large-|v| branch is the asymptotic form.
constexpr double kLogOverflow = 700.0;

}  // namespace

double eval_mu_from_speed2(double speed2, double delta, double rho) {
  const double a = 0.5 * speed2 + std::log(rho);
  if (a > kLogOverflow) return std::exp(-a);
  return 1.0 / (delta + std::exp(a));
}

double eval_mu(const Vec3& v, double delta, double rho) { return eval_mu_from_speed2(v.norm2(), delta, rho); }

double eval_mu_bar_sqrt_from_speed2(double speed2, double delta, double rho) {
  const double a = 0.5 * speed2 + std::log(rho);
  if (a > kLogOverflow) return std::exp(-0.5 * a);
  const double e = std::exp(a);
  return std::sqrt(e) / (delta + e);
}

double eval_mu_bar_sqrt(const Vec3& v, double delta, double rho) {
  return eval_mu_bar_sqrt_from_speed2(v.norm2(), delta, rho);
}

double eval_mu0(const Vec3& v) { return std::exp(-0.5 * v.norm2()); }

RhoConstants rho_constants(double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidParameter, "rho must be positive");
  RhoConstants c{};
  c.c1 = rho * rho / ((rho + 1.0) * (rho + 1.0) * (rho + 1.0));
  c.c2 = (rho + 1.0) / (rho * rho);
  c.c3 = std::sqrt(rho) * (rho + 1.0) / (rho * rho);
  c.c4 = c.c3 / rho;
  c.c5 = c.c2 + c.c3 + c.c4;
  return c;
}

EquilibriumTables build_tables(const VelocityGrid& grid, const ModelParams& params) {
  params.validate();
  EquilibriumTables t{params.delta, params.rho, {}, {}, {}, {}};
  const std::size_t n = grid.size();
  t.mu.resize(n);
  t.mu_bar_sqrt.resize(n);
  t.mu0.resize(n);
  t.w_beta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& v = grid.node(i);
    const double s2 = v.norm2();
    t.mu[i] = eval_mu_from_speed2(s2, params.delta, params.rho);
    t.mu_bar_sqrt[i] = eval_mu_bar_sqrt_from_speed2(s2, params.delta, params.rho);
    t.mu0[i] = std::exp(-0.5 * s2);
    t.w_beta[i] = weight_w_beta(v, params.beta);
  }
  return t;
}

DistributionField equilibrium_field(const EquilibriumTables& tables, std::size_t n_x) {
  DistributionField F(n_x, tables.size(), tables.delta);
  for (std::size_t x = 0; x < n_x; ++x)
    for (std::size_t v = 0; v < tables.size(); ++v) F(x, v) = tables.mu[v];
  return F;
}

PerturbationField to_perturbation(const DistributionField& F, const EquilibriumTables& tables) {
  if (F.n_v() != tables.size()) throw Error(ErrorCode::InconsistentShape, "field does not match tables");
  PerturbationField f(F.n_x(), F.n_v());
  for (std::size_t x = 0; x < F.n_x(); ++x)
    for (std::size_t v = 0; v < F.n_v(); ++v) f(x, v) = (F(x, v) - tables.mu[v]) / tables.mu_bar_sqrt[v];
  return f;
}

DistributionField from_perturbation(const PerturbationField& f, const EquilibriumTables& tables) {
  if (f.n_v() != tables.size()) throw Error(ErrorCode::InconsistentShape, "field does not match tables");
  DistributionField F(f.n_x(), f.n_v(), tables.delta);
  for (std::size_t x = 0; x < f.n_x(); ++x)
    for (std::size_t v = 0; v < f.n_v(); ++v) F(x, v) = tables.mu[v] + tables.mu_bar_sqrt[v] * f(x, v);
  return F;
}

}  // namespace qkinetic
