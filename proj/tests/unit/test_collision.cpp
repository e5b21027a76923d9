#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "oracles.hpp"
#include "qkinetic/collision.hpp"
#include "qkinetic/error.hpp"

using namespace qkinetic;
using qk_test::kSeed;

namespace {

struct Small {
  VelocityGrid grid{5.0, 7};
  SphereQuadrature sphere{2, 4};
};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

ModelParams with_delta(double delta, double rho = 1.0) {
  ModelParams p;
  p.delta = delta;
  p.rho = rho;
  return p;
}

}  // namespace

TEST(PostCollision, ConservesMomentumAndEnergy) {
  CounterRng rng(kSeed, 10);
  for (int c = 0; c < 1000; ++c) {
    const Vec3 v = qk_test::gen_velocity(rng, 5), u = qk_test::gen_velocity(rng, 5), w = rng.unit_vector();
    const PostCollision pc = post_collision(v, u, w);
    EXPECT_NEAR((pc.v_prime + pc.u_prime - v - u).norm(), 0.0, 1e-13);
    EXPECT_NEAR(pc.v_prime.norm2() + pc.u_prime.norm2(), v.norm2() + u.norm2(), 1e-12);
    const PostCollision back = post_collision(pc.v_prime, pc.u_prime, w);
    EXPECT_NEAR((back.v_prime - v).norm(), 0.0, 1e-13);
  }
}

TEST(Collision, MatchesBruteForceOracle) {
  Small s;
  for (double delta : {0.0, 0.5, 1.0}) {
    const ModelParams p = with_delta(delta, 0.8);
    CollisionOperator op(p, s.grid, s.sphere);
    for (std::uint64_t c = 0; c < 2; ++c) {
      const auto F = qk_test::gen_admissible_state(op.tables(), s.grid, kSeed, c);
      double scale = 0.0;
      const auto C = op.evaluate(F, 0, &scale);
      const std::vector<double> Fv(F.at_x(0).begin(), F.at_x(0).end());
      for (std::size_t v = 0; v < s.grid.size(); v += 5) {
        const double ref = qk_test::naive_collision(p, s.grid, s.sphere, op.workspace(), Fv, v);
        EXPECT_NEAR(C[v], ref, 1e-12 * scale) << "delta=" << delta << " v=" << v;
      }
    }
  }
}

TEST(Collision, EquilibriumIsAnnihilated) {
  Small s;
  for (double delta : {0.0, 0.5, 1.0})
    for (double rho : {0.5, 1.0, 2.0}) {
      CollisionOperator op(with_delta(delta, rho), s.grid, s.sphere);
      double scale = 0.0;
      const auto C = op.evaluate(equilibrium_field(op.tables(), 1), 0, &scale);
      EXPECT_LE(max_abs(C), 5e-13 * scale);
    }
}

TEST(Collision, SplittingsReproduceOperator) {
  Small s;
  for (double delta : {0.0, 0.5, 1.0}) {
    CollisionOperator op(with_delta(delta), s.grid, s.sphere);
    for (std::uint64_t c = 0; c < 3; ++c) {
      const auto F = qk_test::gen_admissible_state(op.tables(), s.grid, kSeed, 20 + c, 1.0);
      double scale = 0.0;
      const auto C = op.evaluate(F, 0, &scale);
      CollisionRates primary, companion;
      op.rates(F, 0, primary, &companion);
      for (std::size_t v = 0; v < s.grid.size(); ++v) {
        EXPECT_GE(primary.gain[v], 0.0);
        EXPECT_GE(primary.damping[v], 0.0);
        EXPECT_GE(companion.gain[v], 0.0);
        EXPECT_NEAR(primary.gain[v] - primary.damping[v] * F(0, v), C[v], 1e-12 * scale);
        const double G = 1.0 - delta * F(0, v);
        EXPECT_NEAR(companion.gain[v] - companion.damping[v] * G, -delta * C[v], 1e-12 * scale);
      }
    }
  }
}

TEST(Collision, FrequencyMatchesDiscreteOracle) {
  Small s;
  for (double delta : {0.0, 1.0}) {
    const ModelParams p = with_delta(delta, 1.5);
    CollisionOperator op(p, s.grid, s.sphere);
    for (std::size_t v = 0; v < s.grid.size(); v += 17) {
      const auto iv = s.grid.axis_indices(v);
      double ref = 0.0;
      for (std::size_t u = 0; u < s.grid.size(); ++u) {
        const auto iu = s.grid.axis_indices(u);
        const double radial = op.workspace().radial_weight(iv[0] - iu[0], iv[1] - iu[1], iv[2] - iu[2]);
        if (radial == 0.0) continue;
        const Vec3 z = s.grid.node(v) - s.grid.node(u);
        for (std::size_t k = 0; k < s.sphere.size(); ++k) {
          const Vec3 w = s.sphere.nodes()[k];
          const PostCollision pc = post_collision(s.grid.node(v), s.grid.node(u), w);
          const double mu = eval_mu(s.grid.node(u), delta, 1.5);
          const double mvp = eval_mu(pc.v_prime, delta, 1.5), mup = eval_mu(pc.u_prime, delta, 1.5);
          ref += s.sphere.weights()[k] * p.angular_law(z.dot(w) / z.norm()) * radial *
                 (mu - delta * mu * mup - delta * mu * mvp + delta * mup * mvp);
        }
      }
      EXPECT_NEAR(op.nu_delta(v), ref, 1e-12 * ref);
    }
  }
}

TEST(Collision, ClassicalFrequencyConvergesToRadialOracle) {
  // Continuum nu_0 at |v| = 0 and |v| = 2; the lattice error shrinks with h.
  const double exact_angular = 2.0 * std::numbers::pi;  // integral of |cos| over S^2
  double previous_error[2] = {1e300, 1e300};
  for (int n : {7, 13}) {
    VelocityGrid g(6.0, n);
    SphereQuadrature sphere(4, 8);
    CollisionOperator op(with_delta(0.0), g, sphere);
    const double angular = qk_test::angular_integral(sphere, AngularLaw{});
    const int c = (n - 1) / 2;
    const std::size_t nodes[2] = {g.flat_index(c, c, c), g.flat_index(c, c, c + (n - 1) / 6)};
    for (int i = 0; i < 2; ++i) {
      const double s = g.node(nodes[i]).norm();
      // Compare against the oracle with the same angular integral, so only
      // the lattice part of the error remains.
      const double ref = qk_test::classical_nu_oracle(s, -1.0, angular);
      const double err = std::abs(op.nu_delta(nodes[i]) - ref) / ref;
      EXPECT_LT(err, previous_error[i]) << "n=" << n << " |v|=" << s;
      previous_error[i] = err;
    }
    EXPECT_NEAR(angular / exact_angular, 1.0, 0.06);
  }
  EXPECT_LT(previous_error[1], 0.05);
}

TEST(Collision, GainOperatorIsLinear) {
  Small s;
  CollisionOperator op(with_delta(1.0), s.grid, s.sphere);
  CounterRng rng(kSeed, 30);
  const auto f = qk_test::gen_vector(rng, s.grid.size(), -1, 1);
  const auto g = qk_test::gen_vector(rng, s.grid.size(), -1, 1);
  std::vector<double> combo(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) combo[i] = 2.0 * f[i] - 0.5 * g[i];
  const auto Kf = op.apply_gain_operator(f, op.workspace());
  const auto Kg = op.apply_gain_operator(g, op.workspace());
  const auto Kc = op.apply_gain_operator(combo, op.workspace());
  const double scale = max_abs(Kf) + max_abs(Kg);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(Kc[i], 2.0 * Kf[i] - 0.5 * Kg[i], 1e-12 * scale);
}

TEST(Collision, NonlinearRemainderIsQuadraticPlusCubic) {
  // Gamma(t f) = t^2 A + t^3 B, so Gamma(2f) = 4 A + 8 B with A, B from t = +-1.
  Small s;
  for (double delta : {0.0, 1.0}) {
    CollisionOperator op(with_delta(delta), s.grid, s.sphere);
    CounterRng rng(kSeed, 31);
    const auto f = qk_test::gen_vector(rng, s.grid.size(), -0.3, 0.3);
    std::vector<double> neg(f), two(f);
    for (std::size_t i = 0; i < f.size(); ++i) {
      neg[i] = -f[i];
      two[i] = 2.0 * f[i];
    }
    const auto gp = op.gamma_delta(f), gm = op.gamma_delta(neg), g2 = op.gamma_delta(two);
    const double scale = max_abs(g2);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double A = 0.5 * (gp[i] + gm[i]), B = 0.5 * (gp[i] - gm[i]);
      EXPECT_NEAR(g2[i], 4 * A + 8 * B, 1e-11 * scale);
      if (delta == 0.0) EXPECT_NEAR(B, 0.0, 1e-12 * scale);
    }
  }
}

TEST(Collision, NonlinearRemainderMatchesBruteForceExpansion) {
  Small s;
  for (double delta : {0.0, 0.5, 1.0}) {
    const ModelParams p = with_delta(delta, 1.3);
    CollisionOperator op(p, s.grid, s.sphere);
    CounterRng rng(kSeed, 32);
    const auto f = qk_test::gen_vector(rng, s.grid.size(), -0.4, 0.4);
    const auto G = op.gamma_delta(f);
    const auto Gp = op.gamma_delta_plus(f);
    const double scale = max_abs(G) + max_abs(Gp);
    for (std::size_t v = 0; v < s.grid.size(); v += 11) {
      const auto ref = qk_test::naive_gamma(p, s.grid, s.sphere, op.workspace(), f, v);
      double ten = 0.0;
      for (double x : ref.terms) ten += x;
      EXPECT_NEAR(ten, ref.from_polynomial, 1e-10 * scale) << "ten-term display vs expansion";
      EXPECT_NEAR(G[v], ten, 1e-11 * scale);
      // Positive part: terms one, three, four and nine of the display.
      const double plus = ref.terms[0] + ref.terms[2] + ref.terms[3] + ref.terms[8];
      EXPECT_NEAR(Gp[v], plus, 1e-11 * scale);
    }
    EXPECT_EQ(max_abs(op.gamma_delta_plus(std::vector<double>(f.size(), 0.0))), 0.0);
  }
}

TEST(Collision, ConservativeFixRemovesMoments) {
  Small s;
  CollisionOptions opt;
  opt.conservative_fix = true;
  CollisionOperator op(with_delta(1.0), s.grid, s.sphere, opt);
  const auto F = qk_test::gen_admissible_state(op.tables(), s.grid, kSeed, 40);
  double scale = 0.0;
  const auto C = op.evaluate(F, 0, &scale);
  const auto raw = op.evaluate_raw(F, 0);
  const MomentVector m = velocity_moments(C, s.grid);
  const MomentVector r = velocity_moments(raw, s.grid);
  double raw_size = 0.0;
  for (double x : r) raw_size = std::max(raw_size, std::abs(x));
  for (double x : m) EXPECT_LE(std::abs(x), 1e-13 * std::max(raw_size, scale));
}

TEST(Collision, RejectsInadmissibleInput) {
  Small s;
  CollisionOperator op(with_delta(1.0), s.grid, s.sphere);
  DistributionField F = equilibrium_field(op.tables(), 1);
  F(0, 3) = 1.5;
  try {
    (void)op.evaluate(F, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BoundViolation);
  }
  F(0, 3) = std::nan("");
  EXPECT_THROW((void)op.evaluate(F, 0), Error);
  EXPECT_THROW((void)op.evaluate(equilibrium_field(op.tables(), 1), 1), Error);
}

TEST(Collision, ThreadCountDoesNotChangeResults) {
  Small s;
  CollisionOptions one, four;
  four.threads = 4;
  CollisionOperator a(with_delta(1.0), s.grid, s.sphere, one), b(with_delta(1.0), s.grid, s.sphere, four);
  const auto F = qk_test::gen_admissible_state(a.tables(), s.grid, kSeed, 50);
  EXPECT_EQ(a.evaluate(F, 0), b.evaluate(F, 0));
  EXPECT_EQ(a.nu(), b.nu());
}
