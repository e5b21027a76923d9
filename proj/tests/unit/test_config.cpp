#include <gtest/gtest.h>

#include "qkinetic/config.hpp"
#include "qkinetic/error.hpp"

using namespace qkinetic;

namespace {
ErrorCode code_of(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::NotApplicable;
}
}  // namespace

TEST(Config, EmptyObjectKeepsDefaults) {
  const RunConfig c = parse_config("{}");
  EXPECT_EQ(c.model.delta, 1.0);
  EXPECT_EQ(c.grid.n_per_axis, 13);
  EXPECT_FALSE(c.solver.dt.has_value());
  EXPECT_FALSE(c.verify.checks.has_value());
  EXPECT_EQ(c.initial.kind, InitialDataConfig::Kind::Equilibrium);
}

TEST(Config, ParsesEverySection) {
  const RunConfig c = parse_config(R"({
    "model": {"delta": 0.5, "rho": 2, "gamma": -1.5, "beta": 6, "angular_coefficient": 0.5},
    "grid": {"v_max": 5, "n_per_axis": 9, "sphere_polar": 2, "sphere_azimuth": 4,
             "domain_mode": "torus1d", "n_x": 4, "length": 2},
    "solver": {"dt": 0.01, "picard_tol": 1e-9, "max_windows": 3, "substeps": 3, "conservative_fix": true},
    "initial": {"kind": "example", "phi": {"kind": "cosine", "amplitude": 0.2}},
    "cutoff_m": 0.25, "seed": 9, "threads": 2, "snapshots": true,
    "verify": {"checks": ["splitting"], "deltas": [1], "rhos": [1]},
    "sweep": {"axis": "delta", "values": [0, 1]}
  })");
  EXPECT_EQ(c.model.delta, 0.5);
  EXPECT_EQ(c.model.angular_law.coefficient, 0.5);
  EXPECT_EQ(c.grid.domain_mode, DomainMode::Torus1D);
  EXPECT_EQ(c.grid.n_x, 4);
  EXPECT_EQ(*c.solver.dt, 0.01);
  EXPECT_TRUE(c.solver.conservative_fix);
  EXPECT_EQ(c.initial.kind, InitialDataConfig::Kind::Example);
  EXPECT_EQ(c.initial.phi.kind, PhiSpec::Kind::Cosine);
  EXPECT_EQ(c.seed, 9u);
  ASSERT_TRUE(c.verify.checks.has_value());
  EXPECT_EQ(c.verify.checks->size(), 1u);
  EXPECT_EQ(*c.sweep.axis, SweepAxis::Delta);
  EXPECT_EQ(c.sweep.values.size(), 2u);
}

TEST(Config, RejectsMalformedAndUnknown) {
  EXPECT_EQ(code_of("{"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of("[]"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(R"({"modle": {}})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(R"({"model": {"delta": 0.5, "dleta": 1}})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(R"({"model": {"delta": "half"}})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(R"({"grid": {"n_per_axis": 10}})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(R"({"model": {"gamma": 0.5}})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(R"({"model": {"delta": 1.5}})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(R"({"solver": {"dt": -1}})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(R"({"initial": {"kind": "banana"}})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(R"({"sweep": {"axis": "colour"}})"), ErrorCode::InvalidConfig);
}

TEST(Config, EmptyCheckListIsKeptDistinctFromAbsent) {
  const RunConfig c = parse_config(R"({"verify": {"checks": []}})");
  ASSERT_TRUE(c.verify.checks.has_value());
  EXPECT_TRUE(c.verify.checks->empty());
}

TEST(Config, NullStepMeansHorizon) {
  const RunConfig c = parse_config(R"({"solver": {"dt": null}})");
  EXPECT_FALSE(c.solver.dt.has_value());
}

TEST(Config, Fnv1aReferenceVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Config, MissingFile) {
  try {
    (void)read_text_file("/nonexistent/qkinetic.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
  try {
    (void)load_config("/nonexistent/qkinetic.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
}
