#include "qkinetic/collision.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "qkinetic/error.hpp"

namespace qkinetic {

PostCollision post_collision(const Vec3& v, const Vec3& u, const Vec3& omega) noexcept {
  const Vec3 shift = omega * (v - u).dot(omega);
  return {v - shift, u + shift};
}

MomentVector velocity_moments(std::span<const double> values, const VelocityGrid& grid) {
  if (values.size() != grid.size()) throw Error(ErrorCode::InconsistentShape, "moment input does not match grid");
  MomentVector m{};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Vec3& v = grid.node(i);
    const double f = values[i];
    m[0] += f;
    m[1] += f * v.x;
    m[2] += f * v.y;
    m[3] += f * v.z;
    m[4] += f * v.norm2();
  }
  for (double& x : m) x *= grid.cell_weight();
  return m;
}

void remove_moments(std::span<double> values, const MomentVector& moments, std::span<const double> weight,
                    const VelocityGrid& grid) {
  if (values.size() != grid.size() || weight.size() != grid.size())
    throw Error(ErrorCode::InconsistentShape, "projection input does not match grid");
  Eigen::Matrix<double, 5, 5> a = Eigen::Matrix<double, 5, 5>::Zero();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3& v = grid.node(i);
    const Eigen::Matrix<double, 5, 1> psi(1.0, v.x, v.y, v.z, v.norm2());
    a.noalias() += weight[i] * psi * psi.transpose();
  }
  a *= grid.cell_weight();
  const Eigen::Matrix<double, 5, 1> rhs(moments[0], moments[1], moments[2], moments[3], moments[4]);
  const Eigen::Matrix<double, 5, 1> lambda = a.ldlt().solve(rhs);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3& v = grid.node(i);
    const double c = lambda[0] + lambda[1] * v.x + lambda[2] * v.y + lambda[3] * v.z + lambda[4] * v.norm2();
    values[i] -= weight[i] * c;
  }
}

void conservative_projection(std::span<double> values, std::span<const double> weight, const VelocityGrid& grid) {
  remove_moments(values, velocity_moments(values, grid), weight, grid);
}

namespace {

inline double mu_at(double energy, double delta, double rho) noexcept { return 1.0 / (delta + rho * energy); }

// Off-grid state mu(w) + sqrt(mu_bar)(w) f(w); sqrt(mu_bar) = sqrt(rho E) mu.
inline double state_at(double mu, double root_energy, double root_rho, double f_interp) noexcept {
  return mu + root_rho * root_energy * mu * f_interp;
}

inline double clamp_state(double f, double upper) noexcept { return f < 0.0 ? 0.0 : (f > upper ? upper : f); }

// Padded buffer of the perturbation f = (F - mu) / sqrt(mu_bar) at one x-node.
std::vector<double> padded_perturbation(const CollisionWorkspace& ws, std::span<const double> state,
                                        const EquilibriumTables& t) {
  std::vector<double> f(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) f[i] = (state[i] - t.mu[i]) / t.mu_bar_sqrt[i];
  std::vector<double> padded(ws.padded_size());
  ws.scatter_padded(f, padded);
  return padded;
}

std::vector<double> padded_copy(const CollisionWorkspace& ws, std::span<const double> f) {
  std::vector<double> padded(ws.padded_size());
  ws.scatter_padded(f, padded);
  return padded;
}

}  // namespace

CollisionOperator::CollisionOperator(const ModelParams& params, const VelocityGrid& grid,
                                     const SphereQuadrature& sphere, CollisionOptions options)
    : params_(params), options_(options), sphere_(sphere) {
  params_.validate();
  workspace_ = std::make_shared<const CollisionWorkspace>(grid, sphere, KernelSpec{params.gamma, params.angular_law},
                                                          std::nullopt, options.kernel_cache_bytes);
  tables_ = build_tables(grid, params_);

  const CollisionWorkspace& ws = *workspace_;
  const double delta = params_.delta, rho = params_.rho;
  const std::vector<double>& mu = tables_.mu;
  nu_.assign(grid.size(), 0.0);
  parallel_for(grid.size(), options_.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      double sum = 0.0;
      ws.for_each_collision(v, [&](const CollisionSample& s) {
        const double mu_u = mu[s.u];
        const double mu_vp = mu_at(s.vp_energy, delta, rho);
        const double mu_up = mu_at(s.up_energy, delta, rho);
        sum += s.weight * (mu_u - delta * mu_u * mu_up - delta * mu_u * mu_vp + delta * mu_up * mu_vp);
      });
      nu_[v] = sum;
    }
  });
}

void CollisionOperator::require_state(const DistributionField& F, std::size_t x) const {
  if (F.n_v() != grid().size()) throw Error(ErrorCode::InconsistentShape, "field does not match velocity grid");
  if (x >= F.n_x()) throw Error(ErrorCode::InconsistentShape, "x-node " + std::to_string(x) + " out of range");
  if (F.delta() != params_.delta) throw Error(ErrorCode::InconsistentShape, "field delta differs from model delta");
  const double hi = F.upper_bound();
  const auto slice = F.at_x(x);
  for (std::size_t v = 0; v < slice.size(); ++v) {
    if (!(slice[v] >= 0.0 && slice[v] <= hi)) {
      const BoundViolation bv{x, v, slice[v], 0.0, hi};
      throw Error(std::isfinite(slice[v]) ? ErrorCode::BoundViolation : ErrorCode::NonFiniteValue,
                  "collision input: " + bv.describe());
    }
  }
}

std::vector<double> CollisionOperator::evaluate(const DistributionField& F, std::size_t x, double* scale) const {
  std::vector<double> out = evaluate_raw(F, x, scale);
  if (options_.conservative_fix) conservative_projection(out, tables_.mu, grid());
  return out;
}

std::vector<double> CollisionOperator::evaluate_raw(const DistributionField& F, std::size_t x, double* scale) const {
  require_state(F, x);
  const CollisionWorkspace& ws = *workspace_;
  const double delta = params_.delta, rho = params_.rho, hi = F.upper_bound();
  const auto state = F.at_x(x);
  const std::vector<double> fp = padded_perturbation(ws, state, tables_);
  const double root_rho = std::sqrt(rho);
  const std::size_t nv = grid().size();
  std::vector<double> out(nv), loss_mag(nv);
  parallel_for(nv, options_.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      const double Fv = state[v];
      const double Gv = 1.0 - delta * Fv;
      double net = 0.0, loss = 0.0;
      ws.for_each_collision(v, [&](const CollisionSample& s) {
        const double Fu = state[s.u];
        const double Fvp = clamp_state(state_at(mu_at(s.vp_energy, delta, rho), s.vp_energy_root, root_rho,
                                                ws.interpolate(fp.data(), s.vp_base, s.vp_frac)),
                                       hi);
        const double Fup = clamp_state(state_at(mu_at(s.up_energy, delta, rho), s.up_energy_root, root_rho,
                                                ws.interpolate(fp.data(), s.up_base, s.up_frac)),
                                       hi);
        const double l = Fu * Fv * (1.0 - delta * Fup) * (1.0 - delta * Fvp);
        net += s.weight * (Fup * Fvp * (1.0 - delta * Fu) * Gv - l);
        loss += s.weight * l;
      });
      out[v] = net;
      loss_mag[v] = loss;
    }
  });
  if (scale != nullptr) *scale = *std::max_element(loss_mag.begin(), loss_mag.end());
  return out;
}

void CollisionOperator::rates(const DistributionField& F, std::size_t x, CollisionRates& primary,
                              CollisionRates* companion) const {
  require_state(F, x);
  const CollisionWorkspace& ws = *workspace_;
  const double delta = params_.delta, rho = params_.rho, hi = F.upper_bound();
  const auto state = F.at_x(x);
  const std::vector<double> fp = padded_perturbation(ws, state, tables_);
  const double root_rho = std::sqrt(rho);
  const std::size_t nv = grid().size();
  primary.gain.assign(nv, 0.0);
  primary.damping.assign(nv, 0.0);
  if (companion != nullptr) {
    companion->gain.assign(nv, 0.0);
    companion->damping.assign(nv, 0.0);
  }
  parallel_for(nv, options_.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      double gain = 0.0, pauli_gain = 0.0, loss = 0.0;
      ws.for_each_collision(v, [&](const CollisionSample& s) {
        const double Fu = state[s.u];
        const double Fvp = clamp_state(state_at(mu_at(s.vp_energy, delta, rho), s.vp_energy_root, root_rho,
                                                ws.interpolate(fp.data(), s.vp_base, s.vp_frac)),
                                       hi);
        const double Fup = clamp_state(state_at(mu_at(s.up_energy, delta, rho), s.up_energy_root, root_rho,
                                                ws.interpolate(fp.data(), s.up_base, s.up_frac)),
                                       hi);
        const double g = s.weight * Fup * Fvp * (1.0 - delta * Fu);
        gain += g;
        pauli_gain += delta * g;
        loss += s.weight * Fu * (1.0 - delta * Fup) * (1.0 - delta * Fvp);
      });
      primary.gain[v] = gain;
      primary.damping[v] = pauli_gain + loss;
      if (companion != nullptr) {
        companion->gain[v] = loss;
        companion->damping[v] = pauli_gain + loss;
      }
    }
  });
  auto check = [&](const std::vector<double>& values, const char* what) {
    for (std::size_t v = 0; v < values.size(); ++v)
      if (values[v] < 0.0 || !std::isfinite(values[v]))
        throw Error(ErrorCode::NegativeRate, std::string(what) + " is negative or non-finite at v-node " +
                                                 std::to_string(v));
  };
  check(primary.gain, "gain");
  check(primary.damping, "damping");
}

CollisionRates CollisionOperator::gain_and_damping(const DistributionField& F, std::size_t x) const {
  CollisionRates r;
  rates(F, x, r, nullptr);
  return r;
}

CollisionRates CollisionOperator::companion_gain_and_damping(const DistributionField& F, std::size_t x) const {
  CollisionRates primary, companion;
  rates(F, x, primary, &companion);
  return companion;
}

std::vector<double> CollisionOperator::apply_gain_operator(std::span<const double> f, const CollisionWorkspace& ws,
                                                           bool flip_third) const {
  if (f.size() != grid().size()) throw Error(ErrorCode::InconsistentShape, "perturbation does not match grid");
  if (ws.grid().n_per_axis() != grid().n_per_axis() || ws.grid().v_max() != grid().v_max())
    throw Error(ErrorCode::InconsistentShape, "workspace grid differs from operator grid");
  const double delta = params_.delta, rho = params_.rho;
  const std::vector<double>& mu = tables_.mu;
  std::vector<double> h(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) h[i] = tables_.mu_bar_sqrt[i] * f[i];
  const std::vector<double> fp = padded_copy(ws, f);
  const double root_rho = std::sqrt(rho);
  const double third = flip_third ? -1.0 : 1.0;
  std::vector<double> out(f.size());
  parallel_for(f.size(), options_.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      const double mv = mu[v];
      double sum = 0.0;
      ws.for_each_collision(v, [&](const CollisionSample& s) {
        const double mu_u = mu[s.u];
        const double mvp = mu_at(s.vp_energy, delta, rho);
        const double mup = mu_at(s.up_energy, delta, rho);
        const double hvp = root_rho * s.vp_energy_root * mvp * ws.interpolate(fp.data(), s.vp_base, s.vp_frac);
        const double hup = root_rho * s.up_energy_root * mup * ws.interpolate(fp.data(), s.up_base, s.up_frac);
        const double a1 = mvp - delta * mvp * mu_u - delta * mvp * mv + delta * mu_u * mv;
        const double a2 = mup - delta * mup * mu_u - delta * mup * mv + delta * mu_u * mv;
        const double a3 = mv - delta * mv * mup - delta * mv * mvp + delta * mup * mvp;
        sum += s.weight * (hup * a1 + hvp * a2 - third * h[s.u] * a3);
      });
      out[v] = sum / tables_.mu_bar_sqrt[v];
    }
  });
  return out;
}

std::vector<double> CollisionOperator::gamma_delta(std::span<const double> f) const {
  if (f.size() != grid().size()) throw Error(ErrorCode::InconsistentShape, "perturbation does not match grid");
  const CollisionWorkspace& ws = *workspace_;
  const double d = params_.delta, rho = params_.rho;
  const std::vector<double>& mu = tables_.mu;
  std::vector<double> h(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) h[i] = tables_.mu_bar_sqrt[i] * f[i];
  const std::vector<double> fp = padded_copy(ws, f);
  const double root_rho = std::sqrt(rho);
  std::vector<double> out(f.size());
  parallel_for(f.size(), options_.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      const double mv = mu[v];
      const double hv = h[v];
      double sum = 0.0;
      ws.for_each_collision(v, [&](const CollisionSample& s) {
        const double mu_u = mu[s.u];
        const double hu = h[s.u];
        const double mvp = mu_at(s.vp_energy, d, rho);
        const double mup = mu_at(s.up_energy, d, rho);
        const double hvp = root_rho * s.vp_energy_root * mvp * ws.interpolate(fp.data(), s.vp_base, s.vp_frac);
        const double hup = root_rho * s.up_energy_root * mup * ws.interpolate(fp.data(), s.up_base, s.up_frac);
        const double t = hup * hvp * (1.0 - d * mv - d * mu_u) - hu * hv * (1.0 - d * mvp - d * mup) +
                         d * hvp * hu * (mv - mup) + d * hup * hu * (mv - mvp) + d * hvp * hv * (mu_u - mup) +
                         d * hup * hv * (mu_u - mvp) + d * hu * hv * hup + d * hu * hv * hvp -
                         d * hup * hvp * hu - d * hup * hvp * hv;
        sum += s.weight * t;
      });
      out[v] = sum / tables_.mu_bar_sqrt[v];
    }
  });
  return out;
}

std::vector<double> CollisionOperator::gamma_delta_plus(std::span<const double> f) const {
  if (f.size() != grid().size()) throw Error(ErrorCode::InconsistentShape, "perturbation does not match grid");
  const CollisionWorkspace& ws = *workspace_;
  const double d = params_.delta, rho = params_.rho;
  const std::vector<double>& mu = tables_.mu;
  std::vector<double> h(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) h[i] = tables_.mu_bar_sqrt[i] * f[i];
  const std::vector<double> fp = padded_copy(ws, f);
  const double root_rho = std::sqrt(rho);
  std::vector<double> out(f.size());
  parallel_for(f.size(), options_.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      const double mv = mu[v];
      double sum = 0.0;
      ws.for_each_collision(v, [&](const CollisionSample& s) {
        const double mu_u = mu[s.u];
        const double hu = h[s.u];
        const double mvp = mu_at(s.vp_energy, d, rho);
        const double mup = mu_at(s.up_energy, d, rho);
        const double hvp = root_rho * s.vp_energy_root * mvp * ws.interpolate(fp.data(), s.vp_base, s.vp_frac);
        const double hup = root_rho * s.up_energy_root * mup * ws.interpolate(fp.data(), s.up_base, s.up_frac);
        const double t = hup * hvp * (1.0 - d * mv - d * mu_u) + d * hvp * hu * (mv - mup) +
                         d * hup * hu * (mv - mvp) - d * hup * hvp * hu;
        sum += s.weight * t;
      });
      out[v] = sum / tables_.mu_bar_sqrt[v];
    }
  });
  return out;
}

}  // namespace qkinetic
