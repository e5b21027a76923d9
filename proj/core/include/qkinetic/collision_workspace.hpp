#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qkinetic/cutoff.hpp"
#include "qkinetic/grid.hpp"
#include "qkinetic/params.hpp"

namespace qkinetic {

struct KernelSpec {
  double gamma = -1.0;
  AngularLaw angular{};
};

/// One (v, u, omega) quadrature point as seen by an integrand.
///
/// Post-collision velocities are off-grid; they are described by the base
/// corner of their trilinear stencil in the padded lattice and the
/// fractional position inside that cell. `vp_energy` / `up_energy` hold
/// exp(|v'|^2 / 2) and exp(|u'|^2 / 2); the `_root` members their square roots.
struct CollisionSample {
  double weight;
  std::size_t u;
  std::size_t vp_base;
  std::size_t up_base;
  const double* vp_frac;
  const double* up_frac;
  double vp_energy;
  double up_energy;
  double vp_energy_root;
  double up_energy_root;
};

/// Precomputed quadrature of the collision integral over u (lattice nodes)
/// and omega (hemisphere of the sphere rule, weights doubled).
///
/// Kernel weights depend only on the lattice offset d = (v - u) / h and
/// omega, so they are tabulated once per (offset, omega). For |d| <= 2 the
/// point value |v - u|^gamma is replaced by the cell integral of |z|^gamma;
/// the u = v pair has weight 0 and the integral over its cell is moved to
/// the six face neighbours and the six axial nodes at distance 2 with
/// second-order extrapolation weights (faces only, equally, if that would
/// make an axial weight negative). An optional cutoff multiplies the
/// radial factor by chi_m(|z|), integrated over cells that straddle the ramp.
class CollisionWorkspace {
 public:
  static constexpr std::size_t kDefaultCacheBytes = std::size_t{1} << 30;

  struct Entry {
    double weight;
    std::int64_t vp_shift;
    std::int64_t up_shift;
    std::array<double, 3> vp_frac;
    std::array<double, 3> up_frac;
  };

  CollisionWorkspace(const VelocityGrid& grid, const SphereQuadrature& sphere, KernelSpec kernel,
                     std::optional<CutoffSpec> cutoff = std::nullopt,
                     std::size_t cache_bytes = kDefaultCacheBytes);

  [[nodiscard]] const VelocityGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] const KernelSpec& kernel() const noexcept { return kernel_; }
  [[nodiscard]] const std::optional<CutoffSpec>& cutoff() const noexcept { return cutoff_; }
  [[nodiscard]] std::size_t hemisphere_size() const noexcept { return omegas_.size(); }
  [[nodiscard]] const Vec3& omega(std::size_t k) const noexcept { return omegas_[k]; }
  [[nodiscard]] bool cached() const noexcept { return !table_.empty(); }
  /// True when the centre cell uses the second-order extrapolation.
  [[nodiscard]] bool centre_extrapolated() const noexcept { return centre_extrapolated_; }
  [[nodiscard]] std::size_t table_bytes() const noexcept { return table_.size() * sizeof(Entry); }

  /// Radial factor of offset d: h^3 |d h|^gamma, or the cell integral of
  /// |z|^gamma (times chi_m when a cutoff is set). Zero at d = 0.
  [[nodiscard]] double radial_weight(int d0, int d1, int d2) const;

  /// Kernel weight of (offset, hemisphere node k), including the angular
  /// law, the doubled sphere weight, and the radial factor.
  [[nodiscard]] double pair_weight(int d0, int d1, int d2, std::size_t k) const;

  // Padded lattice used for interpolation with zero extension.
  [[nodiscard]] int padding() const noexcept { return pad_; }
  [[nodiscard]] std::size_t padded_extent() const noexcept { return static_cast<std::size_t>(np_); }
  [[nodiscard]] std::size_t padded_size() const noexcept {
    return static_cast<std::size_t>(np_) * np_ * np_;
  }
  [[nodiscard]] std::size_t padded_index(std::size_t node) const noexcept { return padded_of_node_[node]; }

  /// Writes node values into a zero-padded buffer of padded_size().
  void scatter_padded(std::span<const double> node_values, std::span<double> padded) const;

  [[nodiscard]] double interpolate(const double* padded, std::size_t base, const double* frac) const noexcept {
    const std::size_t sy = static_cast<std::size_t>(np_);
    const std::size_t sx = sy * sy;
    const double* p = padded + base;
    const double fx = frac[0], fy = frac[1], fz = frac[2];
    const double c00 = p[0] + fz * (p[1] - p[0]);
    const double c01 = p[sy] + fz * (p[sy + 1] - p[sy]);
    const double c10 = p[sx] + fz * (p[sx + 1] - p[sx]);
    const double c11 = p[sx + sy] + fz * (p[sx + sy + 1] - p[sx + sy]);
    const double c0 = c00 + fy * (c01 - c00);
    const double c1 = c10 + fy * (c11 - c10);
    return c0 + fx * (c1 - c0);
  }

  [[nodiscard]] Entry make_entry(int d0, int d1, int d2, std::size_t k) const;

  /// Visits every quadrature point of the collision integral at node v in
  /// a fixed order (omega outer, u inner).
  template <class Body>
  void for_each_collision(std::size_t v, Body&& body) const {
    const auto iv = grid_.axis_indices(v);
    const int n = grid_.n_per_axis();
    const std::size_t nv = grid_.size();
    const std::size_t pv = padded_of_node_[v];
    CollisionSample s{};
    for (std::size_t k = 0; k < omegas_.size(); ++k) {
      const double* perp = exp_perp_.data() + k * nv;
      const double* par = exp_par_.data() + k * nv;
      const double* sperp = root_perp_.data() + k * nv;
      const double* spar = root_par_.data() + k * nv;
      const double perp_v = perp[v];
      const double par_v = par[v];
      const double sperp_v = sperp[v];
      const double spar_v = spar[v];
      std::size_t u = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int l = 0; l < n; ++l, ++u) {
            const int d0 = iv[0] - i, d1 = iv[1] - j, d2 = iv[2] - l;
            Entry scratch;
            const Entry* e;
            if (!table_.empty()) {
              e = &table_[k * n_offsets_ + offset_index(d0, d1, d2)];
            } else {
              scratch = make_entry(d0, d1, d2, k);
              e = &scratch;
            }
            if (e->weight == 0.0) continue;
            s.weight = e->weight;
            s.u = u;
            s.vp_base = static_cast<std::size_t>(static_cast<std::int64_t>(pv) + e->vp_shift);
            s.up_base = static_cast<std::size_t>(static_cast<std::int64_t>(padded_of_node_[u]) + e->up_shift);
            s.vp_frac = e->vp_frac.data();
            s.up_frac = e->up_frac.data();
            s.vp_energy = perp_v * par[u];
            s.up_energy = perp[u] * par_v;
            s.vp_energy_root = sperp_v * spar[u];
            s.up_energy_root = sperp[u] * spar_v;
            body(s);
          }
        }
      }
    }
  }

 private:
  [[nodiscard]] std::size_t offset_index(int d0, int d1, int d2) const noexcept {
    const int span = 2 * grid_.n_per_axis() - 1;
    const int c = grid_.n_per_axis() - 1;
    return (static_cast<std::size_t>(d0 + c) * span + (d1 + c)) * span + (d2 + c);
  }
  void build_radial_weights();

  VelocityGrid grid_;
  KernelSpec kernel_;
  std::optional<CutoffSpec> cutoff_;
  std::vector<Vec3> omegas_;
  std::vector<double> omega_weights_;  // doubled hemisphere weights
  std::size_t n_offsets_ = 0;
  std::vector<double> radial_;         // per offset
  bool centre_extrapolated_ = false;
  int pad_ = 0;
  int np_ = 0;
  std::vector<std::size_t> padded_of_node_;
  std::vector<double> exp_perp_;       // [k][node] exp((|x|^2 - (x.w)^2) / 2)
  std::vector<double> exp_par_;        // [k][node] exp((x.w)^2 / 2)
  std::vector<double> root_perp_;      // square roots of the two tables above
  std::vector<double> root_par_;
  std::vector<Entry> table_;
};

/// Integral of |z|^gamma * chi(|z|) over the axis-aligned cube of side h
/// centred at d * h (d integer). chi defaults to 1.
double cell_kernel_integral(int d0, int d1, int d2, double h, double gamma,
                            const std::optional<CutoffSpec>& cutoff = std::nullopt);

}  // namespace qkinetic
