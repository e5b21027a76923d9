#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "qkinetic/params.hpp"
#include "qkinetic/vec3.hpp"

namespace qkinetic {

/// Truncated Cartesian lattice on [-v_max, v_max]^3 with an odd number of
/// nodes per axis, so that v = 0 is a node and v -> -v maps nodes to nodes.
/// Node (i, j, k) has flat index (i * n + j) * n + k.
class VelocityGrid {
 public:
  VelocityGrid(double v_max, int n_per_axis);

  [[nodiscard]] double v_max() const noexcept { return v_max_; }
  [[nodiscard]] int n_per_axis() const noexcept { return n_; }
  [[nodiscard]] double spacing() const noexcept { return h_; }
  [[nodiscard]] double cell_weight() const noexcept { return h_ * h_ * h_; }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

  [[nodiscard]] const Vec3& node(std::size_t index) const { return nodes_[index]; }
  [[nodiscard]] std::span<const Vec3> nodes() const noexcept { return nodes_; }

  [[nodiscard]] std::size_t flat_index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  [[nodiscard]] std::array<int, 3> axis_indices(std::size_t index) const noexcept;

  /// Index of the node at -v.
  [[nodiscard]] std::size_t mirror(std::size_t index) const noexcept;

 private:
  double v_max_;
  int n_;
  double h_;
  std::vector<Vec3> nodes_;
};

/// Product Gauss-Legendre (in cos of the polar angle) x uniform azimuth rule
/// on the unit sphere. Weights sum to 4*pi; the node set is closed under
/// omega -> -omega.
class SphereQuadrature {
 public:
  SphereQuadrature(int n_polar, int n_azimuth);

  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::span<const Vec3> nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] int n_polar() const noexcept { return n_polar_; }
  [[nodiscard]] int n_azimuth() const noexcept { return n_azimuth_; }

  /// Index of the antipodal node.
  [[nodiscard]] std::size_t antipode(std::size_t index) const { return antipode_[index]; }

  /// One representative from each antipodal pair (pair weight not doubled).
  [[nodiscard]] std::span<const std::size_t> hemisphere() const noexcept { return hemisphere_; }

 private:
  int n_polar_;
  int n_azimuth_;
  std::vector<Vec3> nodes_;
  std::vector<double> weights_;
  std::vector<std::size_t> antipode_;
  std::vector<std::size_t> hemisphere_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// Either a single homogeneous cell (volume 1) or a periodic interval of
/// length L sampled at n_x equispaced nodes x_i = i * L / n_x.
class SpatialGrid {
 public:
  static SpatialGrid homogeneous();
  static SpatialGrid torus(double length, int n_x);

  [[nodiscard]] DomainMode mode() const noexcept { return mode_; }
  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(n_x_); }
  [[nodiscard]] double length() const noexcept { return length_; }
  [[nodiscard]] double spacing() const noexcept { return length_ / n_x_; }
  /// Quadrature weight of one node (1 in homogeneous mode).
  [[nodiscard]] double cell_volume() const noexcept { return spacing(); }
  [[nodiscard]] double position(std::size_t i) const noexcept { return spacing() * static_cast<double>(i); }

 private:
  SpatialGrid(DomainMode mode, double length, int n_x) : mode_(mode), length_(length), n_x_(n_x) {}

  DomainMode mode_;
  double length_;
  int n_x_;
};

struct GridConfig {
  double v_max = 6.0;
  int n_per_axis = 13;
  int sphere_polar = 4;
  int sphere_azimuth = 8;
  DomainMode domain_mode = DomainMode::Homogeneous;
  int n_x = 1;
  double length = 1.0;
};

struct Grids {
  VelocityGrid velocity;
  SphereQuadrature sphere;
  SpatialGrid space;
};

/// Validates the configuration and builds all three grids.
Grids build_grids(const GridConfig& config);

}  // namespace qkinetic
