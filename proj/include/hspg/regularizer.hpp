#pragma once

#include "hspg/groups.hpp"
#include "hspg/parameters.hpp"

namespace hspg {

// The mixed l1/l2 penalty and its group operators. Everything here is a pure
// function; zero groups map to zero throughout (the subdifferential selection
// the half-space step makes by restricting to the nonzero support).

/// Omega(x) = sum_g ||x_g||_2. The bias is not penalized.
double omega(const Parameters& p, const GroupPartition& partition);

/// Group soft-threshold: per group, max{0, 1 - threshold/||x_g||} * x_g.
/// Groups at or below the threshold come out as exact zeros; the bias passes
/// through unchanged.
Parameters prox_group_l2(const Parameters& x_hat, const GroupPartition& partition,
                         double threshold);

/// Keeps a group of z iff z_g . x_ref_g >= epsilon * ||x_ref_g||^2, writes an
/// exact zero group otherwise. Ties keep the group. Groups with x_ref_g = 0
/// satisfy the inequality trivially and pass through; callers that fix those
/// groups at zero must do so before projecting.
Parameters half_space_project(const Parameters& z, const Parameters& x_ref,
                              const GroupPartition& partition, double epsilon);

/// Per group x_g / ||x_g|| on the nonzero support, exact zero elsewhere.
/// The bias component is zero.
Parameters grad_omega_on_support(const Parameters& p, const GroupPartition& partition);

/// Prox-gradient residual xi_eta(x) = (x - prox_{eta*lambda*Omega}(x - eta*grad_f)) / eta,
/// the stationarity measure reported in traces.
Parameters gradient_mapping(const Parameters& x, double eta, const Parameters& grad_f,
                            const GroupPartition& partition, double lambda);

}  // namespace hspg
