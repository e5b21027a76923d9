#include <gtest/gtest.h>

#include <cmath>

#include "qkinetic/error.hpp"
#include "qkinetic/verifier.hpp"

using namespace qkinetic;

namespace {
ModelParams params(double delta, double rho) {
  ModelParams p;
  p.delta = delta;
  p.rho = rho;
  return p;
}

ContractionRun run(double factor, std::vector<double> ratios) {
  ContractionRun r{factor, {}};
  r.report.ratios = std::move(ratios);
  r.report.converged = true;
  return r;
}
}  // namespace

TEST(ProductBounds, HoldWithExactConstants) {
  for (double delta : {0.0, 0.5, 1.0})
    for (double rho : {0.5, 1.0, 2.0}) {
      const BoundReport r = check_equilibrium_product_bounds(params(delta, rho), 5000, 3);
      EXPECT_TRUE(r.pass) << r.id << " delta=" << delta << " rho=" << rho;
      EXPECT_LE(r.worst_ratio, 1.0 + 1e-12);
      EXPECT_EQ(r.seed, 3u);
    }
}

TEST(ProductBounds, ReproducibleUnderSeed) {
  const BoundReport a = check_equilibrium_product_bounds(params(1, 1), 2000, 11);
  const BoundReport b = check_equilibrium_product_bounds(params(1, 1), 2000, 11);
  const BoundReport c = check_equilibrium_product_bounds(params(1, 1), 2000, 12);
  EXPECT_EQ(a.worst_ratio, b.worst_ratio);
  ASSERT_EQ(a.metrics.size(), b.metrics.size());
  for (std::size_t i = 0; i < a.metrics.size(); ++i) EXPECT_EQ(a.metrics[i].second, b.metrics[i].second);
  EXPECT_NE(a.worst_ratio, c.worst_ratio);
}

TEST(CutoffGain, ZeroRadiusGivesZero) {
  SphereQuadrature s(2, 4);
  const double k = cutoff_gain_local([](const Vec3&) { return 1.0; }, Vec3{0.5, 0, 0}, params(1, 1), CutoffSpec{0.0},
                                     2, s, s);
  EXPECT_EQ(k, 0.0);
}

TEST(CutoffGain, SmallRadiusRateMatchesKernelExponent) {
  ResolutionPair pair;
  pair.coarse = GridConfig{3.0, 5, 4, 8};
  pair.fine = GridConfig{3.0, 9, 4, 8};
  CutoffDecaySettings settings;
  settings.m_values = {0.05, 0.1};
  settings.v_radius = 1.0;
  for (double gamma : {-1.0, -2.0}) {
    ModelParams p = params(1, 1);
    p.gamma = gamma;
    const BoundReport r = check_cutoff_gain_decay(p, pair, settings);
    EXPECT_NEAR(r.metric("small_m_slope"), 3.0 + gamma, 0.3);
    EXPECT_TRUE(r.pass) << r.metric("relative_change");
  }
}

TEST(NonlinearEstimate, RejectsHypothesisViolations) {
  ResolutionPair pair;
  NonlinearEstimateSettings s;
  s.p = 1.2;  // needs p > 3 / (3 + gamma) = 1.5
  EXPECT_THROW((void)check_nonlinear_estimate(params(1, 1), pair, s), Error);
  ModelParams low_beta = params(1, 1);
  low_beta.beta = 5.0;
  EXPECT_THROW((void)check_nonlinear_estimate(low_beta, pair, {}), Error);
}

TEST(SmoothField, WeightedNormBoundedByAmplitude) {
  VelocityGrid g(6.0, 13);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto f = smooth_random_field(g, 7.0, 1, k, 0.25);
    double n = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      n = std::max(n, std::pow(1 + g.node(i).norm(), 7.0) * std::abs(f[i]));
    EXPECT_LE(n, 0.25);
    EXPECT_GT(n, 0.0);
  }
  VelocityGrid coarse(6.0, 7);
  const auto a = smooth_random_field(g, 7.0, 1, 3), b = smooth_random_field(coarse, 7.0, 1, 3);
  EXPECT_EQ(a[g.flat_index(6, 6, 6)], b[coarse.flat_index(3, 3, 3)]);
}

TEST(Contraction, SyntheticReports) {
  EXPECT_TRUE(check_contraction({run(1, {0.4, 0.3}), run(0.5, {0.2, 0.15}), run(0.25, {0.1})}).pass);
  EXPECT_FALSE(check_contraction({run(1, {0.4, 1.2}), run(0.5, {0.2}), run(0.25, {0.1})}).pass);
  EXPECT_FALSE(check_contraction({run(1, {0.4}), run(0.5, {0.5}), run(0.25, {0.1})}).pass);
  EXPECT_THROW((void)check_contraction({}), Error);
}

TEST(ClassicalLimit, SlopeIsOne) {
  const BoundReport r = check_classical_limit(params(1, 1), GridConfig{5.0, 7, 2, 4});
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.metric("slope"), 1.0, 0.2);
}

TEST(Decomposition, ResidualCheckAndMutation) {
  const GridConfig g{5.0, 7, 2, 4};
  EXPECT_TRUE(check_decomposition(params(1, 1), g, 2, 5).pass);
  EXPECT_TRUE(check_decomposition(params(0, 1), g, 2, 5).pass);
  EXPECT_FALSE(check_decomposition(params(1, 1), g, 2, 5, LinearizedOptions{true}).pass);
}

TEST(RandomPerturbation, IsAdmissible) {
  VelocityGrid g(6.0, 9);
  for (double delta : {0.0, 0.5, 1.0}) {
    const auto t = build_tables(g, params(delta, 1.0));
    for (std::uint64_t k = 0; k < 10; ++k) {
      const auto F = from_perturbation(random_admissible_perturbation(t, g, 9, k), t);
      EXPECT_FALSE(F.first_violation().has_value());
    }
  }
}

TEST(RunVerification, PlanValidationAndIds) {
  VerificationPlan plan;
  plan.checks = {};
  EXPECT_THROW((void)run_verification(plan), Error);
  plan.checks = {"no_such_check"};
  try {
    (void)run_verification(plan);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
  plan.checks = {"equilibrium_product_bounds"};
  plan.deltas = {0.0, 1.0};
  plan.rhos = {0.5};
  plan.samples = 1000;
  const auto reports = run_verification(plan);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].id, "equilibrium_product_bounds[delta=0,rho=0.5]");
  EXPECT_EQ(reports[1].id, "equilibrium_product_bounds[delta=1,rho=0.5]");
  plan.threads = 2;
  const auto again = run_verification(plan);
  for (std::size_t i = 0; i < reports.size(); ++i) EXPECT_EQ(reports[i].worst_ratio, again[i].worst_ratio);
}
