#include "qkinetic/collision_workspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qkinetic/error.hpp"

namespace qkinetic {

namespace {

constexpr int kCorrectionRadius2 = 4;  // cells with |d| <= 2 use cell integrals

struct Rule {
  std::vector<double> x;  // nodes on [0, 1]
  std::vector<double> w;
};

// Composite Gauss-Legendre on [0, 1].
Rule composite_rule(int panels, int order) {
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);
  Rule r;
  for (int p = 0; p < panels; ++p) {
    const double a = static_cast<double>(p) / panels;
    const double len = 1.0 / panels;
    for (int i = 0; i < order; ++i) {
      r.x.push_back(a + 0.5 * len * (gx[i] + 1.0));
      r.w.push_back(0.5 * len * gw[i]);
    }
  }
  return r;
}

double chi_or_one(double tau, const std::optional<CutoffSpec>& cutoff) {
  return cutoff ? chi_m(tau, *cutoff) : 1.0;
}

// Closest and farthest distance from the origin to the unit cube at d.
void cube_distance_range(int d0, int d1, int d2, double& r_min, double& r_max) {
  double lo = 0.0, hi = 0.0;
  for (int d : {d0, d1, d2}) {
    const double a = std::abs(static_cast<double>(d));
    const double near = std::max(0.0, a - 0.5);
    const double far = a + 0.5;
    lo += near * near;
    hi += far * far;
  }
  r_min = std::sqrt(lo);
  r_max = std::sqrt(hi);
}

// Integral over the centre cube [-1/2, 1/2]^3 in unit coordinates, by the
// Duffy split into 24 congruent pyramids 0 <= y, z <= x <= 1/2.
double centre_cell_unit_integral(double h, double gamma, const std::optional<CutoffSpec>& cutoff) {
  const double q = 3.0 + gamma;
  const double a = 0.5;
  const Rule st = composite_rule(2, 10);
  if (!cutoff) {
    double sum = 0.0;
    for (std::size_t i = 0; i < st.x.size(); ++i)
      for (std::size_t j = 0; j < st.x.size(); ++j)
        sum += st.w[i] * st.w[j] * std::pow(1.0 + st.x[i] * st.x[i] + st.x[j] * st.x[j], 0.5 * gamma);
    return 24.0 * std::pow(a, q) / q * sum;
  }
  // x = a y^{1/q} turns x^{q-1} dx into (a^q / q) dy.
  const Rule yr = composite_rule(16, 8);
  double sum = 0.0;
  for (std::size_t i = 0; i < st.x.size(); ++i) {
    for (std::size_t j = 0; j < st.x.size(); ++j) {
      const double s2 = 1.0 + st.x[i] * st.x[i] + st.x[j] * st.x[j];
      const double rad = std::sqrt(s2);
      double inner = 0.0;
      for (std::size_t k = 0; k < yr.x.size(); ++k) {
        const double x = a * std::pow(yr.x[k], 1.0 / q);
        inner += yr.w[k] * chi_m(h * x * rad, *cutoff);
      }
      sum += st.w[i] * st.w[j] * std::pow(s2, 0.5 * gamma) * inner;
    }
  }
  return 24.0 * std::pow(a, q) / q * sum;
}

double offcentre_cell_unit_integral(int d0, int d1, int d2, double h, double gamma,
                                    const std::optional<CutoffSpec>& cutoff) {
  const Rule r = composite_rule(6, 5);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double z0 = d0 - 0.5 + r.x[i];
    for (std::size_t j = 0; j < r.x.size(); ++j) {
      const double z1 = d1 - 0.5 + r.x[j];
      const double wij = r.w[i] * r.w[j];
      for (std::size_t k = 0; k < r.x.size(); ++k) {
        const double z2 = d2 - 0.5 + r.x[k];
        const double rad = std::sqrt(z0 * z0 + z1 * z1 + z2 * z2);
        sum += wij * r.w[k] * std::pow(rad, gamma) * chi_or_one(h * rad, cutoff);
      }
    }
  }
  return sum;
}

}  // namespace

double cell_kernel_integral(int d0, int d1, int d2, double h, double gamma,
                            const std::optional<CutoffSpec>& cutoff) {
  const double scale = std::pow(h, 3.0 + gamma);
  if (cutoff && cutoff->m <= 0.0) return 0.0;
  if (d0 == 0 && d1 == 0 && d2 == 0) return scale * centre_cell_unit_integral(h, gamma, cutoff);
  return scale * offcentre_cell_unit_integral(d0, d1, d2, h, gamma, cutoff);
}

CollisionWorkspace::CollisionWorkspace(const VelocityGrid& grid, const SphereQuadrature& sphere, KernelSpec kernel,
                                       std::optional<CutoffSpec> cutoff, std::size_t cache_bytes)
    : grid_(grid), kernel_(kernel), cutoff_(cutoff) {
  if (!(kernel.gamma > -3.0 && kernel.gamma < 0.0))
    throw Error(ErrorCode::InvalidParameter, "kernel exponent must lie in (-3, 0)");
  if (cutoff && !(cutoff->m >= 0.0)) throw Error(ErrorCode::InvalidParameter, "cutoff radius must be >= 0");
  for (std::size_t k : sphere.hemisphere()) {
    omegas_.push_back(sphere.nodes()[k]);
    omega_weights_.push_back(2.0 * sphere.weights()[k]);
  }

  const int n = grid_.n_per_axis();
  const int span = 2 * n - 1;
  n_offsets_ = static_cast<std::size_t>(span) * span * span;
  build_radial_weights();

  // Post-collision points stay within a ball around the box; the margin
  // covers |Delta| plus the trilinear stencil.
  pad_ = static_cast<int>(std::ceil((std::sqrt(6.0) - 1.0) * (n - 1) / 2.0)) + 2;
  np_ = n + 2 * pad_;
  padded_of_node_.resize(grid_.size());
  for (std::size_t node = 0; node < grid_.size(); ++node) {
    const auto a = grid_.axis_indices(node);
    padded_of_node_[node] =
        (static_cast<std::size_t>(a[0] + pad_) * np_ + (a[1] + pad_)) * np_ + (a[2] + pad_);
  }

  const std::size_t nk = omegas_.size();
  exp_perp_.resize(nk * grid_.size());
  exp_par_.resize(nk * grid_.size());
  root_perp_.resize(nk * grid_.size());
  root_par_.resize(nk * grid_.size());
  for (std::size_t k = 0; k < nk; ++k) {
    for (std::size_t node = 0; node < grid_.size(); ++node) {
      const Vec3& x = grid_.node(node);
      const double a = x.dot(omegas_[k]);
      exp_perp_[k * grid_.size() + node] = std::exp(0.5 * (x.norm2() - a * a));
      exp_par_[k * grid_.size() + node] = std::exp(0.5 * a * a);
      root_perp_[k * grid_.size() + node] = std::exp(0.25 * (x.norm2() - a * a));
      root_par_[k * grid_.size() + node] = std::exp(0.25 * a * a);
    }
  }

  if (nk * n_offsets_ * sizeof(Entry) <= cache_bytes) {
    table_.resize(nk * n_offsets_);
    for (std::size_t k = 0; k < nk; ++k)
      for (int d0 = -(n - 1); d0 <= n - 1; ++d0)
        for (int d1 = -(n - 1); d1 <= n - 1; ++d1)
          for (int d2 = -(n - 1); d2 <= n - 1; ++d2)
            table_[k * n_offsets_ + offset_index(d0, d1, d2)] = make_entry(d0, d1, d2, k);
  }
}

void CollisionWorkspace::build_radial_weights() {
  const int n = grid_.n_per_axis();
  const double h = grid_.spacing();
  const double gamma = kernel_.gamma;
  radial_.assign(n_offsets_, 0.0);
  const bool empty_support = cutoff_ && cutoff_->m <= 0.0;
  if (empty_support) return;

  for (int d0 = -(n - 1); d0 <= n - 1; ++d0) {
    for (int d1 = -(n - 1); d1 <= n - 1; ++d1) {
      for (int d2 = -(n - 1); d2 <= n - 1; ++d2) {
        const int r2 = d0 * d0 + d1 * d1 + d2 * d2;
        if (r2 == 0) continue;
        double w;
        const bool corrected = r2 <= kCorrectionRadius2;
        double r_min = 0.0, r_max = 0.0;
        cube_distance_range(d0, d1, d2, r_min, r_max);
        if (cutoff_ && h * r_min >= 2.0 * cutoff_->m) {
          w = 0.0;
        } else if (cutoff_ && h * r_max > cutoff_->m) {
          w = cell_kernel_integral(d0, d1, d2, h, gamma, cutoff_);
        } else if (corrected) {
          w = cell_kernel_integral(d0, d1, d2, h, gamma);
        } else {
          w = h * h * h * std::pow(h * std::sqrt(static_cast<double>(r2)), gamma);
        }
        radial_[offset_index(d0, d1, d2)] = w;
      }
    }
  }

  // The excluded u = v cell. Averages over the axial rings at distance h
  // and 2h reproduce the centre value with errors (h^2/6) and (4h^2/6)
  // times the Laplacian; their 4/3, -1/3 combination cancels it.
  const double centre_extent = h * std::sqrt(3.0) / 2.0;
  const double centre = (cutoff_ && centre_extent > cutoff_->m)
                            ? cell_kernel_integral(0, 0, 0, h, gamma, cutoff_)
                            : cell_kernel_integral(0, 0, 0, h, gamma);
  // n >= 3, so the ring at 2h is always on the offset lattice.
  const bool extrapolate = radial_[offset_index(2, 0, 0)] - centre / 18.0 >= 0.0;
  centre_extrapolated_ = extrapolate;
  const double near_share = extrapolate ? centre * 4.0 / 18.0 : centre / 6.0;
  const double far_share = extrapolate ? -centre / 18.0 : 0.0;
  for (int s : {-1, 1}) {
    radial_[offset_index(s, 0, 0)] += near_share;
    radial_[offset_index(0, s, 0)] += near_share;
    radial_[offset_index(0, 0, s)] += near_share;
    if (extrapolate) {
      radial_[offset_index(2 * s, 0, 0)] += far_share;
      radial_[offset_index(0, 2 * s, 0)] += far_share;
      radial_[offset_index(0, 0, 2 * s)] += far_share;
    }
  }
}

double CollisionWorkspace::radial_weight(int d0, int d1, int d2) const {
  const int c = grid_.n_per_axis() - 1;
  if (std::abs(d0) > c || std::abs(d1) > c || std::abs(d2) > c)
    throw Error(ErrorCode::InvalidParameter, "lattice offset outside the grid");
  return radial_[offset_index(d0, d1, d2)];
}

double CollisionWorkspace::pair_weight(int d0, int d1, int d2, std::size_t k) const {
  const double r = radial_weight(d0, d1, d2);
  if (r == 0.0) return 0.0;
  const Vec3 d{static_cast<double>(d0), static_cast<double>(d1), static_cast<double>(d2)};
  const double cos_theta = d.dot(omegas_[k]) / d.norm();
  return kernel_.angular(cos_theta) * omega_weights_[k] * r;
}

CollisionWorkspace::Entry CollisionWorkspace::make_entry(int d0, int d1, int d2, std::size_t k) const {
  Entry e{};
  e.weight = pair_weight(d0, d1, d2, k);
  if (e.weight == 0.0) return e;
  const Vec3& w = omegas_[k];
  const double a = d0 * w.x + d1 * w.y + d2 * w.z;
  const std::array<double, 3> delta{a * w.x, a * w.y, a * w.z};
  std::array<std::int64_t, 3> sv{}, su{};
  for (int i = 0; i < 3; ++i) {
    const double fv = std::floor(-delta[i]);
    const double fu = std::floor(delta[i]);
    sv[i] = static_cast<std::int64_t>(fv);
    su[i] = static_cast<std::int64_t>(fu);
    e.vp_frac[i] = -delta[i] - fv;
    e.up_frac[i] = delta[i] - fu;
  }
  const auto np = static_cast<std::int64_t>(np_);
  e.vp_shift = (sv[0] * np + sv[1]) * np + sv[2];
  e.up_shift = (su[0] * np + su[1]) * np + su[2];
  return e;
}

void CollisionWorkspace::scatter_padded(std::span<const double> node_values, std::span<double> padded) const {
  if (node_values.size() != grid_.size() || padded.size() != padded_size())
    throw Error(ErrorCode::InconsistentShape, "scatter_padded: buffer sizes do not match the workspace");
  std::fill(padded.begin(), padded.end(), 0.0);
  for (std::size_t node = 0; node < grid_.size(); ++node) padded[padded_of_node_[node]] = node_values[node];
}

}  // namespace qkinetic
