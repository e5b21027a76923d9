#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qkinetic/error.hpp"
#include "qkinetic/grid.hpp"

using namespace qkinetic;

TEST(VelocityGrid, NodesAreSymmetricAndContainOrigin) {
  VelocityGrid g(6.0, 9);
  EXPECT_DOUBLE_EQ(g.spacing(), 1.5);
  EXPECT_EQ(g.size(), 729u);
  const std::size_t centre = g.flat_index(4, 4, 4);
  EXPECT_EQ(g.node(centre), (Vec3{0, 0, 0}));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 m = g.node(g.mirror(i));
    EXPECT_EQ(m, -g.node(i));
    const auto a = g.axis_indices(i);
    EXPECT_EQ(g.flat_index(a[0], a[1], a[2]), i);
  }
}

TEST(VelocityGrid, RejectsEvenAndTinyNodeCounts) {
  try {
    VelocityGrid g(6.0, 10);
    FAIL() << "even node count accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EvenNodeCount);
  }
  EXPECT_THROW(VelocityGrid(6.0, 1), Error);
  EXPECT_THROW(VelocityGrid(-1.0, 9), Error);
}

TEST(SphereQuadrature, WeightsSumToSurfaceArea) {
  for (int np : {2, 4, 8})
    for (int na : {4, 8, 16}) {
      SphereQuadrature s(np, na);
      double sum = 0.0;
      for (double w : s.weights()) sum += w;
      EXPECT_NEAR(sum, 4.0 * std::numbers::pi, 1e-12);
    }
}

TEST(SphereQuadrature, AntipodesAndHemisphere) {
  SphereQuadrature s(4, 8);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Vec3 a = s.nodes()[s.antipode(k)];
    EXPECT_NEAR((a + s.nodes()[k]).norm(), 0.0, 1e-14);
    EXPECT_DOUBLE_EQ(s.weights()[s.antipode(k)], s.weights()[k]);
    EXPECT_NEAR(s.nodes()[k].norm(), 1.0, 1e-14);
  }
  EXPECT_EQ(s.hemisphere().size() * 2, s.size());
}

TEST(SphereQuadrature, IntegratesLowDegreeMonomials) {
  SphereQuadrature s(4, 8);
  double xx = 0, zz = 0, xy = 0, z4 = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Vec3& w = s.nodes()[k];
    xx += s.weights()[k] * w.x * w.x;
    zz += s.weights()[k] * w.z * w.z;
    xy += s.weights()[k] * w.x * w.y;
    z4 += s.weights()[k] * std::pow(w.z, 4);
  }
  const double pi = std::numbers::pi;
  EXPECT_NEAR(xx, 4 * pi / 3, 1e-12);
  EXPECT_NEAR(zz, 4 * pi / 3, 1e-12);
  EXPECT_NEAR(xy, 0.0, 1e-12);
  EXPECT_NEAR(z4, 4 * pi / 5, 1e-12);
}

TEST(SphereQuadrature, RejectsOddAzimuth) {
  try {
    SphereQuadrature s(4, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OddAzimuthCount);
  }
}

TEST(GaussLegendre, ExactForDegreeTwoNMinusOne) {
  for (int n = 1; n <= 12; ++n) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    ASSERT_EQ(x.size(), static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += w[i] * std::pow(x[i], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      EXPECT_NEAR(sum, exact, 1e-13) << "n=" << n << " p=" << p;
    }
  }
}

TEST(SpatialGrid, TorusSpacingAndPositions) {
  const auto t = SpatialGrid::torus(2.0, 8);
  EXPECT_EQ(t.size(), 8u);
  EXPECT_DOUBLE_EQ(t.spacing(), 0.25);
  EXPECT_DOUBLE_EQ(t.position(3), 0.75);
  const auto h = SpatialGrid::homogeneous();
  EXPECT_EQ(h.size(), 1u);
  EXPECT_DOUBLE_EQ(h.cell_volume(), 1.0);
}

TEST(BuildGrids, ValidatesConfiguration) {
  GridConfig c;
  c.n_per_axis = 8;
  EXPECT_THROW(build_grids(c), Error);
  c.n_per_axis = 9;
  c.domain_mode = DomainMode::Torus1D;
  c.n_x = 0;
  EXPECT_THROW(build_grids(c), Error);
  c.n_x = 4;
  const Grids g = build_grids(c);
  EXPECT_EQ(g.space.size(), 4u);
}
