#pragma once

// Hand-rolled generators for property tests. Every generator is a pure
// function of (seed, case index), so a failing case can be replayed alone.

#include <cmath>
#include <cstdint>
#include <vector>

#include "qkinetic/equilibrium.hpp"
#include "qkinetic/field.hpp"
#include "qkinetic/grid.hpp"
#include "qkinetic/params.hpp"
#include "qkinetic/rng.hpp"

namespace qk_test {

using namespace qkinetic;

inline constexpr std::uint64_t kSeed = 0x5eed5eedULL;

inline Vec3 gen_velocity(CounterRng& rng, double v_max) {
  return {rng.uniform(-v_max, v_max), rng.uniform(-v_max, v_max), rng.uniform(-v_max, v_max)};
}

inline ModelParams gen_params(CounterRng& rng) {
  ModelParams p;
  const double deltas[] = {0.0, 0.25, 0.5, 1.0};
  p.delta = deltas[rng.next() % 4];
  p.rho = std::exp(rng.uniform(std::log(0.3), std::log(3.0)));
  p.gamma = rng.uniform(-2.5, -0.3);
  return p;
}

/// Admissible F: mu + a smooth envelope times node noise, scaled to stay in
/// [0, 1/delta] with room `fraction` of the gap to either bound.
inline DistributionField gen_admissible_state(const EquilibriumTables& t, const VelocityGrid& g, std::uint64_t seed,
                                              std::uint64_t index, double fraction = 0.8) {
  CounterRng rng(seed, index);
  const Vec3 c = gen_velocity(rng, 1.5);
  const double width = rng.uniform(0.8, 2.0);
  DistributionField F(1, g.size(), t.delta);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double mu = t.mu[i];
    const double room = t.delta > 0.0 ? std::min(mu, 1.0 / t.delta - mu) : mu;
    const double env = std::exp(-(g.node(i) - c).norm2() / (2.0 * width * width));
    F(0, i) = mu + fraction * room * env * rng.uniform(-1.0, 1.0);
  }
  return F;
}

/// Smooth state F = mu + a Gaussian bump scaled to fit under the Pauli cap.
inline DistributionField gen_smooth_state(const EquilibriumTables& t, const VelocityGrid& g, std::uint64_t seed,
                                          std::uint64_t index) {
  CounterRng rng(seed, index);
  const Vec3 c = gen_velocity(rng, 1.0);
  const double width = rng.uniform(0.7, 1.5);
  const double amp = rng.uniform(-0.5, 0.5);
  DistributionField F(1, g.size(), t.delta);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double mu = t.mu[i];
    const double room = t.delta > 0.0 ? std::min(mu, 1.0 / t.delta - mu) : mu;
    F(0, i) = mu + amp * room * std::exp(-(g.node(i) - c).norm2() / (2.0 * width * width));
  }
  return F;
}

inline std::vector<double> gen_vector(CounterRng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace qk_test
