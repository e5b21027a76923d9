#pragma once

#include <array>
#include <cmath>

namespace qkinetic {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const noexcept { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const noexcept { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const noexcept { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator-() const noexcept { return {-x, -y, -z}; }
  constexpr bool operator==(const Vec3&) const noexcept = default;

  [[nodiscard]] constexpr double dot(const Vec3& o) const noexcept {
    return x * o.x + y * o.y + z * o.z;
  }
  [[nodiscard]] constexpr double norm2() const noexcept { return dot(*this); }
  [[nodiscard]] double norm() const noexcept { return std::sqrt(norm2()); }
};

constexpr Vec3 operator*(double s, const Vec3& v) noexcept { return v * s; }

}  // namespace qkinetic
