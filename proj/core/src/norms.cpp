#include "qkinetic/norms.hpp"

#include <cmath>

#include "qkinetic/error.hpp"

namespace qkinetic {

double weight_w_beta(const Vec3& v, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidParameter, "beta must be positive");
  return std::pow(1.0 + v.norm(), beta);
}

double weighted_sup_norm(const PerturbationField& f, const VelocityGrid& grid, double beta) {
  f.require_finite("weighted_sup_norm");
  if (f.n_v() != grid.size()) throw Error(ErrorCode::InconsistentShape, "field does not match velocity grid");
  std::vector<double> w(grid.size());
  for (std::size_t v = 0; v < grid.size(); ++v) w[v] = weight_w_beta(grid.node(v), beta);
  double best = 0.0;
  for (std::size_t x = 0; x < f.n_x(); ++x)
    for (std::size_t v = 0; v < f.n_v(); ++v) best = std::max(best, w[v] * std::abs(f(x, v)));
  return best;
}

double linf_x_l1_v_norm(const PerturbationField& f, const VelocityGrid& grid) {
  f.require_finite("linf_x_l1_v_norm");
  if (f.n_v() != grid.size()) throw Error(ErrorCode::InconsistentShape, "field does not match velocity grid");
  double best = 0.0;
  for (std::size_t x = 0; x < f.n_x(); ++x) {
    double sum = 0.0;
    for (double value : f.at_x(x)) sum += std::abs(value);
    best = std::max(best, sum * grid.cell_weight());
  }
  return best;
}

}  // namespace qkinetic
