#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "qkinetic/error.hpp"
#include "qkinetic/norms.hpp"
#include "qkinetic/solver.hpp"

using namespace qkinetic;
using qk_test::kSeed;

namespace {

struct Small {
  VelocityGrid grid{4.0, 5};
  SphereQuadrature sphere{2, 4};
  SpatialGrid space = SpatialGrid::homogeneous();
};

DistributionField bump(const CollisionOperator& op, const SpatialGrid& space, double amplitude = 0.1) {
  BumpSpec b;
  b.amplitude = amplitude;
  return make_bump_data(b, op.tables(), op.grid(), space);
}

// Classical RK4 for dF/dt = C(F) in the homogeneous case.
std::vector<double> rk4(const CollisionOperator& op, std::vector<double> y, double T, int steps) {
  const double h = T / steps;
  auto rhs = [&](const std::vector<double>& s) {
    DistributionField F(1, s.size(), op.params().delta);
    for (std::size_t i = 0; i < s.size(); ++i) F(0, i) = s[i];
    return op.evaluate(F, 0);
  };
  auto axpy = [](const std::vector<double>& a, double c, const std::vector<double>& b) {
    std::vector<double> o(a);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += c * b[i];
    return o;
  };
  for (int n = 0; n < steps; ++n) {
    const auto k1 = rhs(y), k2 = rhs(axpy(y, h / 2, k1)), k3 = rhs(axpy(y, h / 2, k2)), k4 = rhs(axpy(y, h, k3));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return y;
}

double max_diff(std::span<const double> a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Horizon, FormulaAndInputValidation) {
  const RhoConstants c = rho_constants(2.0);
  EXPECT_NEAR(suggest_horizon(0.5, 2.0), (1.0 / 16.0) / (c.c5 * 1.75), 1e-15);
  EXPECT_NEAR(suggest_horizon(0.0, 1.0, 0.5), 0.5 / rho_constants(1.0).c5, 1e-15);
  EXPECT_THROW((void)suggest_horizon(-1.0, 1.0), Error);
  EXPECT_THROW((void)suggest_horizon(std::nan(""), 1.0), Error);
}

TEST(Solver, EquilibriumIsAFixedPoint) {
  Small s;
  for (double delta : {0.0, 1.0}) {
    ModelParams p;
    p.delta = delta;
    CollisionOperator op(p, s.grid, s.sphere);
    SolverConfig cfg;
    cfg.dt = 0.1;
    PicardSolver solver(op, s.space, cfg);
    const auto F0 = equilibrium_field(op.tables(), 1);
    const WindowResult w = solver.solve_window(F0, Window{0.0, 0.1});
    EXPECT_TRUE(w.report.converged);
    EXPECT_LE(w.report.iterations, 2);
    EXPECT_LE(max_diff(w.field.at_x(0), op.tables().mu), 1e-14);
  }
}

TEST(Solver, WindowAgreesWithRungeKuttaAtSecondOrder) {
  Small s;
  ModelParams p;
  CollisionOperator op(p, s.grid, s.sphere);
  const auto F0 = bump(op, s.space);
  const std::vector<double> y0(F0.at_x(0).begin(), F0.at_x(0).end());
  const double T = 0.2;
  const auto ref = rk4(op, y0, T, 400);
  double errors[2];
  int i = 0;
  for (int substeps : {3, 5}) {
    SolverConfig cfg;
    cfg.dt = T;
    cfg.substeps = substeps;
    cfg.picard_tol = 1e-13;
    PicardSolver solver(op, s.space, cfg);
    const WindowResult w = solver.solve_window(F0, Window{0.0, T});
    ASSERT_TRUE(w.report.converged);
    errors[i++] = max_diff(w.field.at_x(0), ref);
  }
  EXPECT_LT(errors[1], errors[0]);
  // Halving the substep spacing cuts the error by at least 2^1.5.
  EXPECT_GT(errors[0] / errors[1], 2.8) << errors[0] << " " << errors[1];
}

TEST(Solver, FreeTransportShiftsOnTheTorus) {
  VelocityGrid grid(2.0, 5);  // v_x in {-2, -1, 0, 1, 2}
  SphereQuadrature sphere(2, 4);
  const SpatialGrid space = SpatialGrid::torus(1.0, 8);
  ModelParams p;
  p.angular_law.coefficient = 0.0;
  p.domain_mode = DomainMode::Torus1D;
  CollisionOperator op(p, grid, sphere);
  BumpSpec b;
  b.amplitude = 0.2;
  b.modulation = 0.5;
  const auto F0 = make_bump_data(b, op.tables(), grid, space);
  SolverConfig cfg;
  cfg.dt = 0.125;  // one cell per unit speed
  cfg.max_windows = 3;
  PicardSolver solver(op, space, cfg);
  const Trajectory tr = solver.time_march(F0);
  ASSERT_EQ(tr.size(), 4u);
  const DistributionField& F = tr.back().field;
  for (std::size_t x = 0; x < 8; ++x)
    for (std::size_t v = 0; v < grid.size(); ++v) {
      const int shift = static_cast<int>(std::lround(grid.node(v).x)) * 3;
      const std::size_t from = static_cast<std::size_t>(((static_cast<int>(x) - shift) % 8 + 8) % 8);
      EXPECT_NEAR(F(x, v), F0(from, v), 1e-14);
    }
}

TEST(Solver, ConservativeFixHoldsDefects) {
  Small s;
  ModelParams p;
  CollisionOptions opt;
  opt.conservative_fix = true;
  CollisionOperator op(p, s.grid, s.sphere, opt);
  const auto F0 = bump(op, s.space, 0.2);
  SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.max_windows = 3;
  cfg.conservative_fix = true;
  PicardSolver solver(op, s.space, cfg);
  const Trajectory tr = solver.time_march(F0);
  const DefectMoments m0 = defect_moments(F0, op.tables(), s.grid, s.space);
  for (const auto& pt : tr) {
    const DefectMoments m = defect_moments(pt.field, op.tables(), s.grid, s.space);
    EXPECT_NEAR(m.mass, m0.mass, 1e-12);
    EXPECT_NEAR((m.momentum - m0.momentum).norm(), 0.0, 1e-12);
    EXPECT_NEAR(m.energy, m0.energy, 1e-12);
  }
}

TEST(Solver, EntropyDoesNotIncreaseOnShortRun) {
  VelocityGrid grid(6.0, 9);
  SphereQuadrature sphere(4, 8);
  const SpatialGrid space = SpatialGrid::homogeneous();
  ModelParams p;
  CollisionOptions opt;
  opt.conservative_fix = true;
  CollisionOperator op(p, grid, sphere, opt);
  const auto F0 = bump(op, space, 0.1);
  SolverConfig cfg;
  cfg.dt = 0.02;
  cfg.substeps = 3;
  cfg.max_windows = 3;
  cfg.conservative_fix = true;
  PicardSolver solver(op, space, cfg);
  const Trajectory tr = solver.time_march(F0);
  for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_LE(tr[i].record.entropy, tr[i - 1].record.entropy + 1e-12);
  for (const auto& pt : tr) {
    EXPECT_EQ(pt.report.clamp_events, 0u);
    ASSERT_TRUE(pt.report.companion_violation.has_value() || pt.window == 0);
  }
}

TEST(Solver, FailureCarriesPartialTrajectory) {
  Small s;
  ModelParams p;
  CollisionOperator op(p, s.grid, s.sphere);
  const auto F0 = bump(op, s.space, 0.2);
  SolverConfig cfg;
  cfg.dt = 0.5;
  cfg.picard_max_iters = 1;
  cfg.max_windows = 2;
  PicardSolver solver(op, s.space, cfg);
  try {
    (void)solver.time_march(F0);
    FAIL() << "expected a convergence failure";
  } catch (const MarchFailure& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConvergenceFailure);
    ASSERT_EQ(e.partial().size(), 1u);
    EXPECT_EQ(e.partial()[0].window, 0);
  }
}

TEST(Solver, HorizonStepContracts) {
  Small s;
  ModelParams p;
  CollisionOperator op(p, s.grid, s.sphere);
  const auto F0 = bump(op, s.space, 0.2);
  SolverConfig cfg;  // no dt: horizon based
  PicardSolver solver(op, s.space, cfg);
  const PerturbationField f0 = to_perturbation(F0, op.tables());
  const double T = suggest_horizon(f0, s.grid, p);
  const WindowResult w = solver.solve_window(F0, Window{0.0, T});
  EXPECT_TRUE(w.report.converged);
  for (double q : w.report.ratios) EXPECT_LT(q, 1.0);
}

TEST(Solver, RejectsInvalidConfig) {
  SolverConfig c;
  c.substeps = 1;
  EXPECT_THROW(c.validate(), Error);
  c = SolverConfig{};
  c.dt = -0.1;
  EXPECT_THROW(c.validate(), Error);
  c = SolverConfig{};
  c.max_windows = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Solver, CompanionViolationIsEmptyForClassicalDelta) {
  Small s;
  ModelParams p;
  p.delta = 0.0;
  CollisionOperator op(p, s.grid, s.sphere);
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.max_windows = 1;
  PicardSolver solver(op, s.space, cfg);
  const Trajectory tr = solver.time_march(bump(op, s.space));
  EXPECT_FALSE(companion_G_check(tr).has_value());
}
