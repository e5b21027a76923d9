#include "qkinetic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qkinetic/norms.hpp"

namespace qkinetic {

void SolverConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidParameter, msg); };
  if (dt && !(*dt > 0.0 && std::isfinite(*dt))) fail("dt must be positive");
  if (!(picard_tol > 0.0)) fail("picard_tol must be positive");
  if (picard_max_iters < 1) fail("picard_max_iters must be at least 1");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) fail("t_end must be finite and >= 0");
  if (max_windows < 0) fail("max_windows must be >= 0");
  if (t_end == 0.0 && max_windows == 0) fail("either t_end or max_windows must be positive");
  if (!(horizon_constant > 0.0)) fail("horizon_constant must be positive");
  if (substeps < 2) fail("substeps must be at least 2");
  if (!(clamp_tolerance >= 0.0)) fail("clamp_tolerance must be >= 0");
}

double suggest_horizon(double weighted_norm, double rho, double horizon_constant) {
  if (!std::isfinite(weighted_norm) || weighted_norm < 0.0)
    throw Error(ErrorCode::NonFiniteValue, "suggest_horizon: norm must be finite and >= 0");
  const double n = weighted_norm;
  return horizon_constant / (rho_constants(rho).c5 * (1.0 + n + n * n));
}

double suggest_horizon(const PerturbationField& f0, const VelocityGrid& grid, const ModelParams& params,
                       double horizon_constant) {
  return suggest_horizon(weighted_sup_norm(f0, grid, params.beta), params.rho, horizon_constant);
}

namespace {

// Exact integrals over one interval of length tau of e^{-g (tau - s)} times
// the two linear hat functions: phi1 weights the left value, phi0 - phi1
// the right one.
void product_weights(double g, double tau, double& phi0, double& phi1) {
  const double x = g * tau;
  if (std::abs(x) < 1e-4) {
    phi0 = tau * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0);
    phi1 = tau * (0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0);
    return;
  }
  const double e = std::exp(-x);
  phi0 = tau * (1.0 - e) / x;
  phi1 = tau * (1.0 - e * (1.0 + x)) / (x * x);
}

bool all_zero(const DistributionField& F) {
  const auto v = F.data().values();
  return std::all_of(v.begin(), v.end(), [](double a) { return a == 0.0; });
}

}  // namespace

PicardSolver::PicardSolver(const CollisionOperator& op, const SpatialGrid& space, SolverConfig config)
    : op_(&op), space_(space), config_(config) {
  config_.validate();
  const auto& t = op.tables();
  weight_.resize(t.size());
  for (std::size_t v = 0; v < t.size(); ++v) weight_[v] = t.w_beta[v] / t.mu_bar_sqrt[v];
}

PicardSolver::SliceRates PicardSolver::slice_rates(const DistributionField& F) const {
  const std::size_t nx = F.n_x(), nv = F.n_v();
  SliceRates r{PhaseSpaceArray(nx, nv), PhaseSpaceArray(nx, nv), PhaseSpaceArray(nx, nv)};
  if (all_zero(F)) return r;
  const double delta = op_->params().delta;
  for (std::size_t x = 0; x < nx; ++x) {
    CollisionRates primary, companion;
    op_->rates(F, x, primary, config_.track_companion ? &companion : nullptr);
    if (config_.conservative_fix) {
      std::vector<double> net(nv);
      const auto state = F.at_x(x);
      for (std::size_t v = 0; v < nv; ++v) net[v] = primary.gain[v] - primary.damping[v] * state[v];
      const std::vector<double> before = primary.gain;
      remove_moments(primary.gain, velocity_moments(net, op_->grid()), op_->tables().mu, op_->grid());
      if (config_.track_companion)
        for (std::size_t v = 0; v < nv; ++v) companion.gain[v] += delta * (before[v] - primary.gain[v]);
    }
    for (std::size_t v = 0; v < nv; ++v) {
      r.gain(x, v) = std::max(0.0, primary.gain[v]);
      r.damping(x, v) = primary.damping[v];
      if (config_.track_companion) r.companion_gain(x, v) = std::max(0.0, companion.gain[v]);
    }
  }
  return r;
}

WindowSlices PicardSolver::picard_step(const WindowSlices& previous, const DistributionField& initial,
                                       const Window& window, StepStats* stats) const {
  const auto S = static_cast<std::size_t>(config_.substeps);
  if (previous.size() != S) throw Error(ErrorCode::InconsistentShape, "previous iterate must hold one field per substep");
  if (!(window.dt > 0.0)) throw Error(ErrorCode::InvalidParameter, "window length must be positive");
  initial.require_admissible("picard_step initial data");
  std::vector<SliceRates> rates;
  rates.reserve(S);
  for (const auto& slice : previous) {
    if (!slice.data().same_shape(initial.data()))
      throw Error(ErrorCode::InconsistentShape, "iterate and initial data differ in shape");
    slice.require_admissible("picard_step iterate");
    rates.push_back(slice_rates(slice));
  }
  std::vector<const SliceRates*> ptrs;
  for (const auto& r : rates) ptrs.push_back(&r);
  return advance(ptrs, initial, window, stats);
}

WindowSlices PicardSolver::advance(const std::vector<const SliceRates*>& rate_ptrs, const DistributionField& initial,
                                   const Window& window, StepStats* stats) const {
  const auto S = static_cast<std::size_t>(config_.substeps);
  auto rates = [&](std::size_t j) -> const SliceRates& { return *rate_ptrs[j]; };
  const std::size_t nx = initial.n_x(), nv = initial.n_v();
  const double delta = initial.delta();
  const double hi = initial.upper_bound();
  const double tau = window.dt / static_cast<double>(S - 1);
  const bool torus = space_.mode() == DomainMode::Torus1D && nx > 1;
  if (space_.size() != nx) throw Error(ErrorCode::InconsistentShape, "field does not match spatial grid");
  const double dx = space_.spacing();

  // Periodic linear interpolation of a per-(x, v) array at position p.
  auto sample = [&](const PhaseSpaceArray& a, std::size_t xi, double shift, std::size_t v) {
    if (!torus) return a(xi, v);
    const double pos = static_cast<double>(xi) - shift / dx;
    const double fl = std::floor(pos);
    const double frac = pos - fl;
    const auto n = static_cast<long long>(nx);
    long long i0 = static_cast<long long>(fl) % n;
    if (i0 < 0) i0 += n;
    const auto i1 = static_cast<std::size_t>((i0 + 1) % n);
    return (1.0 - frac) * a(static_cast<std::size_t>(i0), v) + frac * a(i1, v);
  };

  WindowSlices out;
  out.reserve(S);
  StepStats local;
  double companion_worst = 0.0;
  const bool companion = config_.track_companion && delta > 0.0;
  for (std::size_t j = 0; j < S; ++j) {
    DistributionField next(nx, nv, delta);
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t v = 0; v < nv; ++v) {
        const double vx = op_->grid().node(v).x;
        double F = 0.0, G = 0.0, damp = 0.0;
        double g_right = sample(rates(j).damping, x, 0.0, v);
        double c_right = sample(rates(j).gain, x, 0.0, v);
        double c2_right = companion ? sample(rates(j).companion_gain, x, 0.0, v) : 0.0;
        for (std::size_t i = j; i-- > 0;) {
          const double shift = vx * tau * static_cast<double>(j - i);
          const double g_left = sample(rates(i).damping, x, shift, v);
          const double c_left = sample(rates(i).gain, x, shift, v);
          const double gbar = 0.5 * (g_left + g_right);
          double phi0 = 0.0, phi1 = 0.0;
          product_weights(gbar, tau, phi0, phi1);
          const double decay = std::exp(-damp);
          F += decay * (c_left * phi1 + c_right * (phi0 - phi1));
          if (companion) {
            const double c2_left = sample(rates(i).companion_gain, x, shift, v);
            G += decay * (c2_left * phi1 + c2_right * (phi0 - phi1));
            c2_right = c2_left;
          }
          damp += gbar * tau;
          g_right = g_left;
          c_right = c_left;
        }
        const double shift0 = vx * tau * static_cast<double>(j);
        const double f0 = sample(initial.data(), x, shift0, v);
        const double decay = std::exp(-damp);
        F += decay * f0;
        if (!std::isfinite(F))
          throw Error(ErrorCode::NonFiniteValue, "Picard iterate produced a non-finite value");
        double clamped = F < 0.0 ? 0.0 : (F > hi ? hi : F);
        if (clamped != F) {
          ++local.clamp_events;
          local.max_clamp = std::max(local.max_clamp, std::abs(clamped - F));
        }
        next(x, v) = clamped;
        if (companion) {
          G += decay * (1.0 - delta * f0);
          companion_worst = std::max(companion_worst, std::abs(G - (1.0 - delta * clamped)));
        }
      }
    }
    out.push_back(std::move(next));
  }
  if (companion) local.companion_violation = companion_worst;
  if (stats != nullptr) {
    stats->clamp_events += local.clamp_events;
    stats->max_clamp = std::max(stats->max_clamp, local.max_clamp);
    stats->companion_violation = local.companion_violation;
  }
  return out;
}

double PicardSolver::weighted_difference(const DistributionField& a, const DistributionField& b) const {
  double worst = 0.0;
  for (std::size_t x = 0; x < a.n_x(); ++x)
    for (std::size_t v = 0; v < a.n_v(); ++v) worst = std::max(worst, weight_[v] * std::abs(a(x, v) - b(x, v)));
  return worst;
}

void PicardSolver::apply_state_fix(DistributionField& F, const DefectMoments& target) const {
  const auto& grid = op_->grid();
  const auto& t = op_->tables();
  const DefectMoments now = defect_moments(F, t, grid, space_);
  const double length = space_.cell_volume() * static_cast<double>(space_.size());
  const MomentVector excess{(now.mass - target.mass) / length, (now.momentum.x - target.momentum.x) / length,
                            (now.momentum.y - target.momentum.y) / length,
                            (now.momentum.z - target.momentum.z) / length, (now.energy - target.energy) / length};
  for (std::size_t x = 0; x < F.n_x(); ++x) remove_moments(F.at_x(x), excess, t.mu, grid);
  F.clamp();
}

WindowResult PicardSolver::solve_window(const DistributionField& initial, const Window& window) const {
  initial.require_admissible("solve_window initial data");
  const auto S = static_cast<std::size_t>(config_.substeps);
  const std::size_t nx = initial.n_x(), nv = initial.n_v();
  const auto& grid = op_->grid();
  const auto& params = op_->params();

  IterationReport report;
  report.dt = window.dt;
  const PerturbationField f0 = to_perturbation(initial, op_->tables());
  report.suggested_horizon = suggest_horizon(f0, grid, params, config_.horizon_constant);

  WindowSlices current(S, DistributionField(nx, nv, initial.delta()));
  StepStats stats;
  const SliceRates zero{PhaseSpaceArray(nx, nv), PhaseSpaceArray(nx, nv), PhaseSpaceArray(nx, nv)};
  const SliceRates at_start = slice_rates(initial);
  // The weight w_beta / sqrt(mu_bar) lifts roundoff in F by up to C_beta;
  // differences below this floor carry no contraction information.
  const double noise_floor = 100.0 * std::numeric_limits<double>::epsilon() * c_beta(params.beta);
  for (int n = 0; n < config_.picard_max_iters; ++n) {
    // Slice 0 of every iterate after the seed is the initial datum itself.
    std::vector<SliceRates> fresh;
    fresh.reserve(S);
    std::vector<const SliceRates*> ptrs(S, &zero);
    if (n > 0) {
      ptrs[0] = &at_start;
      for (std::size_t j = 1; j < S; ++j) fresh.push_back(slice_rates(current[j]));
      for (std::size_t j = 1; j < S; ++j) ptrs[j] = &fresh[j - 1];
    }
    WindowSlices next = advance(ptrs, initial, window, &stats);
    double d = 0.0;
    for (std::size_t j = 0; j < S; ++j) d = std::max(d, weighted_difference(next[j], current[j]));
    const double sup = weighted_sup_norm(to_perturbation(next.back(), op_->tables()), grid, params.beta);
    const double scale = std::max(1.0, sup);
    if (!report.differences.empty() && report.differences.back() > noise_floor * scale &&
        d > noise_floor * scale)
      report.ratios.push_back(d / report.differences.back());
    report.differences.push_back(d);
    report.sup_norms.push_back(sup);
    report.iterations = n + 1;
    current = std::move(next);
    if (n > 0 && d <= config_.picard_tol * scale) {
      report.converged = true;
      break;
    }
  }
  report.clamp_events = stats.clamp_events;
  report.max_clamp = stats.max_clamp;
  report.companion_violation = stats.companion_violation;
  if (!report.converged)
    throw ConvergenceFailure("Picard iteration did not converge in " + std::to_string(config_.picard_max_iters) +
                                 " iterations (last difference " + std::to_string(report.differences.back()) + ")",
                             report);
  DistributionField result = std::move(current.back());
  if (config_.conservative_fix)
    apply_state_fix(result, defect_moments(initial, op_->tables(), grid, space_));
  return {std::move(result), std::move(report)};
}

Trajectory PicardSolver::time_march(const DistributionField& F0, const Observer& observer) const {
  F0.require_admissible("time_march initial data");
  const auto& grid = op_->grid();
  const auto& t = op_->tables();
  const auto& params = op_->params();
  const DefectMoments initial = defect_moments(F0, t, grid, space_);

  Trajectory traj;
  traj.push_back({0, 0.0, F0, compute_record(0.0, F0, initial, t, grid, space_, params.beta), {}});
  if (observer) observer(traj.back());

  DistributionField state = F0;
  double time = 0.0;
  for (int w = 1;; ++w) {
    if (config_.t_end > 0.0) {
      if (time >= config_.t_end * (1.0 - 1e-12)) break;
      if (config_.max_windows > 0 && w > config_.max_windows) break;
    } else if (w > config_.max_windows) {
      break;
    }
    double dt = config_.dt ? *config_.dt
                           : suggest_horizon(to_perturbation(state, t), grid, params, config_.horizon_constant);
    if (config_.t_end > 0.0) dt = std::min(dt, config_.t_end - time);
    WindowResult result{DistributionField(0, 0, state.delta()), {}};
    try {
      result = solve_window(state, {time, dt});
    } catch (const Error& e) {
      throw MarchFailure(e.code(), "window " + std::to_string(w) + ": " + e.what(), std::move(traj));
    }
    if (result.report.max_clamp > config_.clamp_tolerance)
      throw MarchFailure(ErrorCode::BoundViolation,
                         "window " + std::to_string(w) + ": clamp magnitude " +
                             std::to_string(result.report.max_clamp) + " exceeds tolerance",
                         std::move(traj));
    time += dt;
    state = result.field;
    DiagnosticsRecord rec =
        compute_record(time, state, initial, t, grid, space_, params.beta, result.report.clamp_events);
    traj.push_back({w, time, state, rec, std::move(result.report)});
    if (observer) observer(traj.back());
  }
  return traj;
}

std::optional<double> companion_G_check(const Trajectory& trajectory) {
  if (trajectory.empty() || trajectory.front().field.delta() == 0.0) return std::nullopt;
  double worst = 0.0;
  bool any = false;
  for (const auto& p : trajectory) {
    if (p.report.companion_violation) {
      worst = std::max(worst, *p.report.companion_violation);
      any = true;
    }
  }
  if (!any) return 0.0;
  return worst;
}

}  // namespace qkinetic
