#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qkinetic/collision.hpp"
#include "qkinetic/cutoff.hpp"
#include "qkinetic/grid.hpp"
#include "qkinetic/linearized.hpp"
#include "qkinetic/params.hpp"
#include "qkinetic/solver.hpp"

namespace qkinetic {

/// Outcome of one numerical check. `worst_ratio` is lhs / rhs without any
/// generic constant; `fitted_constant` is the smallest constant making the
/// inequality hold on the samples (0 for exact-constant checks).
struct BoundReport {
  std::string id;
  std::size_t samples = 0;
  double worst_ratio = 0.0;
  double fitted_constant = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;

  void add(std::string name, double value) { metrics.emplace_back(std::move(name), value); }
  [[nodiscard]] double metric(const std::string& name) const;
};

/// Grid pair used by refinement-stability checks.
struct ResolutionPair {
  GridConfig coarse{6.0, 9, 4, 8};
  GridConfig fine{6.0, 17, 4, 8};
};

constexpr double kStabilityTolerance = 0.2;

/// Relative change |a - b| / max(|a|, |b|).
double relative_change(double a, double b) noexcept;

/// The four pointwise product bounds of the equilibrium family with the
/// exact constants C_1rho, C_2rho, on random (v, u, omega) triples. The
/// second bound is checked as printed and also with the bracket of the
/// third K term (metrics `printed_second_*` / `k_bracket_second_*`).
BoundReport check_equilibrium_product_bounds(const ModelParams& params, std::size_t samples, std::uint64_t seed,
                                             double v_max = 6.0);

/// Fitted constant of C_1rho (1+|v|)^gamma / C <= nu_delta <= C C_2rho (1+|v|)^gamma
/// on the coarse and fine grid; passes when both are finite and agree within 20%.
BoundReport check_collision_frequency_bounds(const ModelParams& params, const ResolutionPair& grids,
                                             unsigned threads = 1);

/// K^m f(v) by a local quadrature over the ball |u - v| <= 2m, for an
/// analytic f. `radial_panels` Gauss panels in |u - v|, `directions` and the
/// omega rule from sphere rules of the given orders.
double cutoff_gain_local(const std::function<double(const Vec3&)>& f, const Vec3& v, const ModelParams& params,
                         const CutoffSpec& cutoff, int radial_panels, const SphereQuadrature& directions,
                         const SphereQuadrature& omegas);

struct CutoffDecaySettings {
  std::vector<double> m_values{0.25, 0.5, 1.0, 2.0};
  double v_radius = 3.0;  ///< evaluation nodes with |v| <= v_radius
};

/// Fits max_v |K^m f(v)| e^{|v|^2/20} / (m^{3+gamma} C_2rho ||f||_inf) over an
/// m-sweep for f in {1, e^{-|v|^2/8}, cos(2 v_x)}, at two quadrature
/// resolutions; also reports the log-log slope in m (expected 3 + gamma).
BoundReport check_cutoff_gain_decay(const ModelParams& params, const ResolutionPair& grids,
                                    const CutoffDecaySettings& settings = {});

/// Smooth random perturbation: three Gaussian bumps (widths in [1, 2])
/// times exp(-|v|^2 / 4), scaled so that ||w_beta f||_inf <= amplitude.
/// The scaling is analytic, so every grid samples the same function.
std::vector<double> smooth_random_field(const VelocityGrid& grid, double beta, std::uint64_t seed,
                                        std::uint64_t index, double amplitude = 0.25);

struct NonlinearEstimateSettings {
  double p = 2.0;
  std::size_t fields = 24;              ///< K; the sample-doubling run uses 2K
  std::vector<double> scales{1.0, 2.0, 4.0};
  std::uint64_t seed = 1;
};

/// Fits the constant of the nonlinear estimate
/// |w_beta Gamma_delta(f)| <= C C_5rho nu (1 + N) (N^{(2p-1)/p} L^{1/p} + N^{(10p-1)/(5p)} L^{1/(5p)}),
/// N = ||w_beta f||_inf, L = ||f||_{L1}, nu the classical frequency, on the
/// coarse grid with K and 2K fields and on the fine grid with K fields.
BoundReport check_nonlinear_estimate(const ModelParams& params, const ResolutionPair& grids,
                                     const NonlinearEstimateSettings& settings = {}, unsigned threads = 1);

struct ContractionRun {
  double dt_factor;  ///< dt / suggested horizon
  IterationReport report;
};

/// Ratios below one at the suggested horizon and a median ratio that
/// shrinks as dt is halved.
BoundReport check_contraction(const std::vector<ContractionRun>& runs);

/// Runs solve_window at dt = {1, 1/2, 1/4} x suggest_horizon from F0.
std::vector<ContractionRun> run_contraction_suite(const CollisionOperator& op, const SpatialGrid& space,
                                                  const DistributionField& F0, SolverConfig config);

/// Slope of log max_v |C_delta(F) - C_0(F)| against log delta over
/// delta in {1e-3, 1e-2, 1e-1, 1}, for a fixed Gaussian-bump F.
BoundReport check_classical_limit(const ModelParams& params, const GridConfig& grid, unsigned threads = 1);

/// max_v |C_delta(mu)| / loss scale <= 5e-13.
BoundReport check_equilibrium_annihilation(const ModelParams& params, const GridConfig& grid,
                                           unsigned threads = 1);

/// Decomposition residual on random admissible perturbations.
BoundReport check_decomposition(const ModelParams& params, const GridConfig& grid, std::size_t fields,
                                std::uint64_t seed, LinearizedOptions hooks = {}, unsigned threads = 1);

/// Both gain/damping splittings and nonnegativity on random admissible states.
BoundReport check_splitting(const ModelParams& params, const GridConfig& grid, std::size_t fields,
                            std::uint64_t seed, unsigned threads = 1);

/// Everything cmd_verify needs: which checks, over which (delta, rho)
/// pairs, and at what resolution.
struct VerificationPlan {
  std::vector<std::string> checks;
  std::vector<double> deltas{0.0, 0.5, 1.0};
  std::vector<double> rhos{0.5, 1.0, 2.0};
  ModelParams base;            ///< gamma, beta, angular law
  GridConfig grid;             ///< annihilation, decomposition, splitting, classical limit
  ResolutionPair pair;         ///< refinement-stability checks
  GridConfig contraction_grid{6.0, 9, 4, 8};
  SolverConfig solver;         ///< contraction runs
  BumpSpec bump;               ///< contraction initial datum
  std::size_t samples = 100000;
  std::size_t fields = 24;
  std::size_t residual_fields = 4;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  LinearizedOptions hooks;
};

/// Ids accepted in VerificationPlan::checks.
const std::vector<std::string>& known_check_ids();

/// Runs every requested check for every (delta, rho) pair (classical_limit
/// once per rho). Independent checks run concurrently; the result is sorted
/// by id, and ids carry the parameter pair, e.g. "splitting[delta=1,rho=0.5]".
/// Throws Error(InvalidConfig) for an empty or unknown check list.
std::vector<BoundReport> run_verification(const VerificationPlan& plan);

/// Random admissible perturbation f with mu + sqrt(mu_bar) f in [0, 1/delta]:
/// f = s(v) * (uniform in [-1, 1]) * min(mu, 1/delta - mu) / sqrt(mu_bar),
/// with s a smooth random envelope of size `amplitude` <= 1.
PerturbationField random_admissible_perturbation(const EquilibriumTables& tables, const VelocityGrid& grid,
                                                 std::uint64_t seed, std::uint64_t index, double amplitude = 0.5);

}  // namespace qkinetic
