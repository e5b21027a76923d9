#include "qkinetic/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qkinetic/error.hpp"

namespace qkinetic {

VelocityGrid::VelocityGrid(double v_max, int n_per_axis) : v_max_(v_max), n_(n_per_axis) {
  if (!(v_max > 0.0) || !std::isfinite(v_max))
    throw Error(ErrorCode::NonPositiveSize, "v_max must be positive");
  if (n_per_axis < 3) throw Error(ErrorCode::NonPositiveSize, "n_per_axis must be at least 3");
  if (n_per_axis % 2 == 0)
    throw Error(ErrorCode::EvenNodeCount, "n_per_axis must be odd, got " + std::to_string(n_per_axis));
  h_ = 2.0 * v_max / (n_ - 1);
  const int c = (n_ - 1) / 2;
  nodes_.reserve(static_cast<std::size_t>(n_) * n_ * n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        nodes_.push_back({(i - c) * h_, (j - c) * h_, (k - c) * h_});
}

std::array<int, 3> VelocityGrid::axis_indices(std::size_t index) const noexcept {
  const auto n = static_cast<std::size_t>(n_);
  return {static_cast<int>(index / (n * n)), static_cast<int>((index / n) % n), static_cast<int>(index % n)};
}

std::size_t VelocityGrid::mirror(std::size_t index) const noexcept {
  const auto a = axis_indices(index);
  return flat_index(n_ - 1 - a[0], n_ - 1 - a[1], n_ - 1 - a[2]);
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw Error(ErrorCode::NonPositiveSize, "Gauss-Legendre order must be positive");
  nodes.assign(static_cast<std::size_t>(order), 0.0);
  weights.assign(static_cast<std::size_t>(order), 0.0);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(order - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  if (order % 2 == 1) nodes[static_cast<std::size_t>(order / 2)] = 0.0;
}

SphereQuadrature::SphereQuadrature(int n_polar, int n_azimuth) : n_polar_(n_polar), n_azimuth_(n_azimuth) {
  if (n_polar < 1 || n_azimuth < 1) throw Error(ErrorCode::NonPositiveSize, "sphere orders must be positive");
  if (n_azimuth % 2 != 0)
    throw Error(ErrorCode::OddAzimuthCount, "azimuth count must be even for antipodal symmetry");
  std::vector<double> x, w;
  gauss_legendre(n_polar, x, w);
  const double dphi = 2.0 * std::numbers::pi / n_azimuth;
  for (int i = 0; i < n_polar; ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = dphi * j;
      nodes_.push_back({s * std::cos(phi), s * std::sin(phi), x[i]});
      weights_.push_back(w[i] * dphi);
    }
  }
  // Polar node i pairs with n_polar - 1 - i; azimuth j with j + n_azimuth / 2.
  const std::size_t total = nodes_.size();
  antipode_.resize(total);
  for (int i = 0; i < n_polar; ++i) {
    for (int j = 0; j < n_azimuth; ++j) {
      const auto self = static_cast<std::size_t>(i * n_azimuth + j);
      const auto other = static_cast<std::size_t>((n_polar - 1 - i) * n_azimuth + (j + n_azimuth / 2) % n_azimuth);
      antipode_[self] = other;
      // Make the pair exactly antipodal in floating point.
      if (other < self) nodes_[self] = -nodes_[other];
    }
  }
  for (std::size_t k = 0; k < total; ++k)
    if (k < antipode_[k]) hemisphere_.push_back(k);
}

SpatialGrid SpatialGrid::homogeneous() { return SpatialGrid(DomainMode::Homogeneous, 1.0, 1); }

SpatialGrid SpatialGrid::torus(double length, int n_x) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw Error(ErrorCode::NonPositiveSize, "torus length must be positive");
  if (n_x < 1) throw Error(ErrorCode::NonPositiveSize, "n_x must be at least 1");
  return SpatialGrid(DomainMode::Torus1D, length, n_x);
}

Grids build_grids(const GridConfig& config) {
  VelocityGrid velocity(config.v_max, config.n_per_axis);
  SphereQuadrature sphere(config.sphere_polar, config.sphere_azimuth);
  SpatialGrid space = config.domain_mode == DomainMode::Homogeneous
                          ? SpatialGrid::homogeneous()
                          : SpatialGrid::torus(config.length, config.n_x);
  return {std::move(velocity), std::move(sphere), space};
}

}  // namespace qkinetic
