#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "qkinetic/collision.hpp"
#include "qkinetic/diagnostics.hpp"
#include "qkinetic/error.hpp"
#include "qkinetic/field.hpp"
#include "qkinetic/grid.hpp"

namespace qkinetic {

struct SolverConfig {
  std::optional<double> dt;         ///< fixed window length; horizon-based when empty
  double picard_tol = 1e-10;        ///< relative to max(1, ||w_beta f||)
  int picard_max_iters = 60;
  double t_end = 0.0;               ///< 0: run max_windows windows
  int max_windows = 10;
  double horizon_constant = 1.0 / 16.0;
  int substeps = 4;                 ///< time points per window, endpoints included
  bool conservative_fix = false;
  bool track_companion = true;
  double clamp_tolerance = 1e-8;    ///< larger clamp magnitudes abort time_march

  void validate() const;
};

struct IterationReport {
  std::vector<double> sup_norms;    ///< ||w_beta f^n|| at the window end
  std::vector<double> differences;  ///< d_n = ||w_beta (f^{n+1} - f^n)|| over all slices
  std::vector<double> ratios;       ///< d_{n+1} / d_n where both are above the roundoff floor
  bool converged = false;
  int iterations = 0;
  std::size_t clamp_events = 0;
  double max_clamp = 0.0;
  std::optional<double> companion_violation;  ///< max |G - (1 - delta F)|; empty for delta = 0
  double dt = 0.0;
  double suggested_horizon = 0.0;
};

/// horizon_constant / (C_5rho (1 + N + N^2)), N = ||w_beta f0||.
double suggest_horizon(double weighted_norm, double rho, double horizon_constant = 1.0 / 16.0);
double suggest_horizon(const PerturbationField& f0, const VelocityGrid& grid, const ModelParams& params,
                       double horizon_constant = 1.0 / 16.0);

struct Window {
  double t0 = 0.0;
  double dt = 0.0;
};

/// The iterate on a window: one field per substep time t0 + j dt / (S - 1).
using WindowSlices = std::vector<DistributionField>;

struct StepStats {
  std::size_t clamp_events = 0;
  double max_clamp = 0.0;
  std::optional<double> companion_violation;
};

struct WindowResult {
  DistributionField field;
  IterationReport report;
};

struct TrajectoryPoint {
  int window = 0;
  double time = 0.0;
  DistributionField field;
  DiagnosticsRecord record;
  IterationReport report;
};

using Trajectory = std::vector<TrajectoryPoint>;

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& message, IterationReport report)
      : Error(ErrorCode::ConvergenceFailure, message), report_(std::move(report)) {}
  [[nodiscard]] const IterationReport& report() const noexcept { return report_; }

 private:
  IterationReport report_;
};

/// Raised by time_march; carries every window completed before the failure.
class MarchFailure : public Error {
 public:
  MarchFailure(ErrorCode code, const std::string& message, Trajectory partial)
      : Error(code, message), partial_(std::move(partial)) {}
  [[nodiscard]] const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

/// Picard iteration of the damped mild form on successive time windows.
///
/// Each iterate solves dF/dt + v.grad F + g(F^n) F = C~(F^n) along
/// characteristics: the damping path integral uses the trapezoid rule over
/// the substep points, the source is integrated exactly for a linear-in-time
/// gain under the interval-averaged damping. On the torus, values off the
/// x-nodes come from periodic linear interpolation.
class PicardSolver {
 public:
  PicardSolver(const CollisionOperator& op, const SpatialGrid& space, SolverConfig config);

  [[nodiscard]] const SolverConfig& config() const noexcept { return config_; }

  /// One iterate from the previous one. `previous` holds substeps slices.
  [[nodiscard]] WindowSlices picard_step(const WindowSlices& previous, const DistributionField& initial,
                                         const Window& window, StepStats* stats = nullptr) const;

  /// Iterates from the zero seed until converged. Throws ConvergenceFailure.
  [[nodiscard]] WindowResult solve_window(const DistributionField& initial, const Window& window) const;

  using Observer = std::function<void(const TrajectoryPoint&)>;

  /// Chains windows from F0; point 0 is F0 itself. Throws MarchFailure.
  [[nodiscard]] Trajectory time_march(const DistributionField& F0, const Observer& observer = {}) const;

 private:
  struct SliceRates {
    PhaseSpaceArray gain, damping, companion_gain;
  };
  SliceRates slice_rates(const DistributionField& F) const;
  WindowSlices advance(const std::vector<const SliceRates*>& rates, const DistributionField& initial,
                       const Window& window, StepStats* stats) const;
  void apply_state_fix(DistributionField& F, const DefectMoments& target) const;
  double weighted_difference(const DistributionField& a, const DistributionField& b) const;

  const CollisionOperator* op_;
  SpatialGrid space_;
  SolverConfig config_;
  std::vector<double> weight_;  ///< w_beta / sqrt(mu_bar)
};

/// max over the trajectory of the per-window companion violation; empty
/// (not applicable) when delta = 0.
std::optional<double> companion_G_check(const Trajectory& trajectory);

}  // namespace qkinetic
