#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hspg/groups.hpp"
#include "hspg/problems.hpp"

namespace hspg {

// Property suites with independent oracles. The oracles here (scalar search,
// finite differences) deliberately avoid the closed forms they check.

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Minimizer of  (1/(2*eta)) * (c-1)^2 * r^2 + lambda * c * r  over c >= 0 by
/// golden-section search; the prox subproblem restricted to the group ray.
double prox_scalar_search(double group_norm, double eta, double lambda);

/// prox_group_l2 against the scalar-search minimizer on random groups of size
/// 1..5, within 1e-6 in argument.
SuiteResult prox_oracle_suite(std::size_t trials, std::uint64_t seed);

/// ||prox(a) - prox(b)|| <= ||a - b|| on random pairs.
SuiteResult prox_nonexpansive_suite(std::size_t trials, std::uint64_t seed);

/// Analytic batch gradient against central finite differences at random
/// points of the given problem.
SuiteResult gradient_check_suite(const Problem& problem, std::size_t points,
                                 std::uint64_t seed, double rtol = 1e-5);

/// gradient_check_suite over `instances` freshly drawn small dense
/// least-squares problems.
SuiteResult gradient_check_ls_suite(std::size_t instances, std::uint64_t seed);

/// gradient_check_suite over `instances` freshly drawn small sparse logistic
/// problems.
SuiteResult gradient_check_logistic_suite(std::size_t instances, std::uint64_t seed);

/// Finite differences of the full composite objective f + lambda*Omega
/// against grad f + lambda * grad_omega, at points with every group nonzero.
/// The penalty-gradient route is injectable so a deliberately broken one can
/// be shown to fail.
using GradOmegaFn = Parameters (*)(const Parameters&, const GroupPartition&);
SuiteResult composite_gradient_suite(std::size_t points, std::uint64_t seed,
                                     GradOmegaFn grad_omega_fn = nullptr);

/// Whenever the prox trial point of a designated group lands inside the
/// l2-ball of radius alpha*lambda, one half-space step (any epsilon in [0,1))
/// zeroes that group. Driven through the full step implementation.
SuiteResult superset_suite(std::size_t draws, std::uint64_t seed);

/// Sufficient decrease and descent-direction checks over full-batch
/// half-space steps of the given problem.
SuiteResult sufficient_decrease_suite(const Problem& problem, const GroupPartition& partition,
                         double lambda, double epsilon, std::size_t steps,
                         std::size_t warm_epochs, std::uint64_t seed);

/// Sparsity identification: on quadratic instances with a known target, any
/// iterate inside the identification ball zeroes the target zero groups
/// after one half-space step.
SuiteResult identification_suite(std::size_t instances, std::uint64_t seed);

/// Small random sparse logistic instance for self-contained suites.
LogisticProblem make_test_logistic(std::size_t num_instances, std::size_t dim,
                                   std::uint64_t seed);

/// Every suite at fixed seeds; the sufficient-decrease suite runs on the given dataset when
/// provided, otherwise on a generated instance.
std::vector<SuiteResult> run_all_suites(const std::string& dataset_path = "",
                                        std::uint64_t seed = 20240901);

}  // namespace hspg
