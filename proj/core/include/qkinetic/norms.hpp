#pragma once

#include "qkinetic/field.hpp"
#include "qkinetic/grid.hpp"

namespace qkinetic {

/// w_beta(v) = (1 + |v|)^beta.
double weight_w_beta(const Vec3& v, double beta);

/// max over (x, v) of w_beta(v) |f(x, v)|.
double weighted_sup_norm(const PerturbationField& f, const VelocityGrid& grid, double beta);

/// max over x of sum_v |f(x, v)| h^3.
double linf_x_l1_v_norm(const PerturbationField& f, const VelocityGrid& grid);

}  // namespace qkinetic
