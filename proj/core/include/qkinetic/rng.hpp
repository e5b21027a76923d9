#pragma once

#include <cstdint>

#include "qkinetic/vec3.hpp"

namespace qkinetic {

/// Counter-based generator: draw k of stream s under seed is
/// splitmix64(key(seed, s) + k * golden), so streams are independent of
/// the order in which they are consumed.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal by Box-Muller (two draws per call, no caching).
  double normal() noexcept;
  /// Uniform direction on the unit sphere.
  Vec3 unit_vector() noexcept;

  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace qkinetic
