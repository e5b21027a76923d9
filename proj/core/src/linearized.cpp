#include "qkinetic/linearized.hpp"

#include <algorithm>
#include <cmath>

#include "qkinetic/error.hpp"

namespace qkinetic {

namespace {

void require_slice(const PerturbationField& f, std::size_t x, std::size_t n_v) {
  if (f.n_v() != n_v) throw Error(ErrorCode::InconsistentShape, "perturbation does not match grid");
  if (x >= f.n_x()) throw Error(ErrorCode::InconsistentShape, "x-node out of range");
  for (double value : f.at_x(x))
    if (!std::isfinite(value)) throw Error(ErrorCode::NonFiniteValue, "perturbation contains non-finite values");
}

}  // namespace

LinearizedOperator::LinearizedOperator(const CollisionOperator& op, CutoffSpec cutoff, LinearizedOptions options)
    : op_(&op), cutoff_(cutoff), options_(options) {
  if (!(cutoff.m >= 0.0) || !std::isfinite(cutoff.m))
    throw Error(ErrorCode::InvalidParameter, "cutoff radius m must be finite and >= 0");
  const CollisionWorkspace& base = op.workspace();
  cutoff_ws_ = std::make_shared<const CollisionWorkspace>(base.grid(), op.sphere(), base.kernel(), cutoff,
                                                          op.options().kernel_cache_bytes);
}

std::vector<double> LinearizedOperator::apply_K_delta(const PerturbationField& f, std::size_t x) const {
  require_slice(f, x, op_->grid().size());
  return op_->apply_gain_operator(f.at_x(x), op_->workspace(), options_.flip_third_k_term);
}

std::vector<double> LinearizedOperator::apply_K_m(const PerturbationField& f, std::size_t x) const {
  require_slice(f, x, op_->grid().size());
  return op_->apply_gain_operator(f.at_x(x), *cutoff_ws_, options_.flip_third_k_term);
}

std::vector<double> LinearizedOperator::apply_K_c(const PerturbationField& f, std::size_t x) const {
  std::vector<double> k = apply_K_delta(f, x);
  const std::vector<double> km = apply_K_m(f, x);
  for (std::size_t i = 0; i < k.size(); ++i) k[i] -= km[i];
  return k;
}

std::vector<double> LinearizedOperator::apply_L_delta(const PerturbationField& f, std::size_t x) const {
  std::vector<double> out = apply_K_delta(f, x);
  const auto slice = f.at_x(x);
  const auto& nu = op_->nu();
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = nu[v] * slice[v] - out[v];
  return out;
}

double LinearizedOperator::decomposition_residual(const PerturbationField& f, std::size_t x) const {
  require_slice(f, x, op_->grid().size());
  const EquilibriumTables& t = op_->tables();
  PerturbationField slice(1, f.n_v());
  std::copy(f.at_x(x).begin(), f.at_x(x).end(), slice.at_x(0).begin());
  const DistributionField F = from_perturbation(slice, t);
  double scale = 0.0;
  const std::vector<double> c = op_->evaluate_raw(F, 0, &scale);
  const std::vector<double> gamma = op_->gamma_delta(slice.at_x(0));
  const std::vector<double> l = apply_L_delta(slice, 0);
  double worst = 0.0;
  for (std::size_t v = 0; v < c.size(); ++v)
    worst = std::max(worst, std::abs(c[v] - t.mu_bar_sqrt[v] * (gamma[v] - l[v])));
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace qkinetic
