#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qkinetic/collision_workspace.hpp"
#include "qkinetic/cutoff.hpp"
#include "qkinetic/error.hpp"

using namespace qkinetic;

namespace {
struct Fixture {
  VelocityGrid grid{6.0, 9};
  SphereQuadrature sphere{2, 4};
};
}  // namespace

TEST(CutoffFunction, ShapeAndContinuity) {
  const CutoffSpec m{0.5};
  EXPECT_EQ(chi_m(0.0, m), 1.0);
  EXPECT_EQ(chi_m(0.5, m), 1.0);
  EXPECT_EQ(chi_m(1.0, m), 0.0);
  EXPECT_EQ(chi_m(3.0, m), 0.0);
  EXPECT_NEAR(chi_m(0.75, m), 0.5, 1e-15);
  double prev = 1.0;
  for (double t = 0.0; t <= 1.2; t += 0.001) {
    const double c = chi_m(t, m);
    EXPECT_LE(c, prev + 1e-15);
    EXPECT_LE(std::abs(c - prev), 0.01);
    prev = c;
  }
}

TEST(Workspace, FarOffsetsUsePointKernel) {
  Fixture f;
  for (double gamma : {-0.5, -1.0, -2.5}) {
    CollisionWorkspace ws(f.grid, f.sphere, KernelSpec{gamma, {}});
    const double h = f.grid.spacing();
    for (auto [a, b, c] : {std::array{3, 0, 0}, std::array{2, 1, 0}, std::array{-4, 2, 7}, std::array{8, 8, 8}}) {
      const double r = h * std::sqrt(double(a * a + b * b + c * c));
      EXPECT_DOUBLE_EQ(ws.radial_weight(a, b, c), h * h * h * std::pow(r, gamma));
    }
  }
}

TEST(Workspace, NearOffsetsMatchCellIntegralsWithCentreShares) {
  Fixture f;
  const double h = f.grid.spacing();
  for (double gamma : {-0.5, -1.0, -2.0, -2.7}) {
    CollisionWorkspace ws(f.grid, f.sphere, KernelSpec{gamma, {}});
    const double centre = qk_test::centre_cube_oracle(h, gamma);
    const double near = ws.centre_extrapolated() ? 4.0 / 18.0 : 1.0 / 6.0;
    const double far = ws.centre_extrapolated() ? -1.0 / 18.0 : 0.0;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    EXPECT_LT(rel(ws.radial_weight(1, 1, 0), qk_test::offcentre_cube_oracle(1, 1, 0, h, gamma)), 1e-9);
    EXPECT_LT(rel(ws.radial_weight(-1, 1, -1), qk_test::offcentre_cube_oracle(1, 1, 1, h, gamma)), 1e-9);
    EXPECT_LT(rel(ws.radial_weight(0, 1, 0), qk_test::offcentre_cube_oracle(1, 0, 0, h, gamma) + near * centre),
              1e-8);
    EXPECT_LT(rel(ws.radial_weight(0, 0, -2), qk_test::offcentre_cube_oracle(2, 0, 0, h, gamma) + far * centre),
              1e-8);
    EXPECT_EQ(ws.radial_weight(0, 0, 0), 0.0);
  }
}

TEST(Workspace, CentreRedistributionPreservesTotalWeight) {
  Fixture f;
  const double h = f.grid.spacing();
  const double gamma = -1.0;
  CollisionWorkspace ws(f.grid, f.sphere, KernelSpec{gamma, {}});
  double near_sum = 0.0, oracle = qk_test::centre_cube_oracle(h, gamma);
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c) {
        const int r2 = a * a + b * b + c * c;
        if (r2 == 0 || r2 > 4) continue;
        near_sum += ws.radial_weight(a, b, c);
        oracle += qk_test::offcentre_cube_oracle(a, b, c, h, gamma);
      }
  EXPECT_NEAR(near_sum / oracle, 1.0, 1e-9);
}

TEST(Workspace, PairWeightIncludesAngularLawAndDoubledWeight) {
  Fixture f;
  CollisionWorkspace ws(f.grid, f.sphere, KernelSpec{-1.0, AngularLaw{0.7}});
  ASSERT_EQ(ws.hemisphere_size() * 2, f.sphere.size());
  for (std::size_t k = 0; k < ws.hemisphere_size(); ++k) {
    const Vec3 w = ws.omega(k);
    std::size_t full = f.sphere.size();
    for (std::size_t j = 0; j < f.sphere.size(); ++j)
      if ((f.sphere.nodes()[j] - w).norm() < 1e-15) full = j;
    ASSERT_LT(full, f.sphere.size());
    const Vec3 d{3, -1, 2};
    const double expected = 0.7 * std::abs(d.dot(w)) / d.norm() * 2.0 * f.sphere.weights()[full] *
                            ws.radial_weight(3, -1, 2);
    EXPECT_NEAR(ws.pair_weight(3, -1, 2, k), expected, 1e-15 * expected);
  }
}

TEST(Workspace, CachedAndUncachedVisitIdenticalSamples) {
  Fixture f;
  CollisionWorkspace cached(f.grid, f.sphere, KernelSpec{-1.0, {}});
  CollisionWorkspace lazy(f.grid, f.sphere, KernelSpec{-1.0, {}}, std::nullopt, 0);
  ASSERT_TRUE(cached.cached());
  ASSERT_FALSE(lazy.cached());
  for (std::size_t v : {std::size_t{0}, std::size_t{364}, f.grid.size() - 1}) {
    std::vector<CollisionSample> a, b;
    cached.for_each_collision(v, [&](const CollisionSample& s) { a.push_back(s); });
    lazy.for_each_collision(v, [&](const CollisionSample& s) { b.push_back(s); });
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].weight, b[i].weight);
      EXPECT_EQ(a[i].vp_base, b[i].vp_base);
      EXPECT_EQ(a[i].up_base, b[i].up_base);
    }
  }
}

TEST(Workspace, CutoffWeightsAreBoundedByFullWeights) {
  Fixture f;
  CollisionWorkspace full(f.grid, f.sphere, KernelSpec{-1.0, {}});
  const double h = f.grid.spacing();
  for (double m : {0.3, 1.0, 2.5}) {
    CollisionWorkspace cut(f.grid, f.sphere, KernelSpec{-1.0, {}}, CutoffSpec{m});
    for (int a = 0; a <= 8; ++a)
      for (int b = 0; b <= a; ++b)
        for (int c = 0; c <= b; ++c) {
          if (a == 0) continue;
          const double w = cut.radial_weight(a, b, c);
          const double r_min = h * std::sqrt(std::pow(std::max(a - 0.5, 0.0), 2) +
                                             std::pow(std::max(b - 0.5, 0.0), 2) + std::pow(std::max(c - 0.5, 0.0), 2));
          // The nearest axial offsets also carry a share of the centre cell.
          if (a * a + b * b + c * c > 4) {
            if (r_min >= 2 * m) EXPECT_EQ(w, 0.0);
            EXPECT_GE(w, 0.0);
            EXPECT_LE(w, full.radial_weight(a, b, c) * (1 + 1e-12));
          }
        }
  }
}

TEST(Workspace, CutoffLimits) {
  Fixture f;
  CollisionWorkspace full(f.grid, f.sphere, KernelSpec{-1.0, {}});
  CollisionWorkspace none(f.grid, f.sphere, KernelSpec{-1.0, {}}, CutoffSpec{0.0});
  CollisionWorkspace all(f.grid, f.sphere, KernelSpec{-1.0, {}}, CutoffSpec{100.0});
  for (int a = -8; a <= 8; ++a)
    for (int b = -8; b <= 8; ++b)
      for (int c = -8; c <= 8; ++c) {
        EXPECT_EQ(none.radial_weight(a, b, c), 0.0);
        EXPECT_EQ(all.radial_weight(a, b, c), full.radial_weight(a, b, c));
      }
}

TEST(Workspace, RejectsInvalidKernel) {
  Fixture f;
  EXPECT_THROW((void)CollisionWorkspace(f.grid, f.sphere, KernelSpec{0.0, {}}), Error);
  EXPECT_THROW((void)CollisionWorkspace(f.grid, f.sphere, KernelSpec{-3.0, {}}), Error);
  EXPECT_THROW((void)CollisionWorkspace(f.grid, f.sphere, KernelSpec{-1.0, {}}, CutoffSpec{-1.0}), Error);
  CollisionWorkspace ws(f.grid, f.sphere, KernelSpec{-1.0, {}});
  EXPECT_THROW((void)ws.radial_weight(9, 0, 0), Error);
}
