#include <doctest.h>

#include "hspg/regularizer.hpp"
#include "hspg/rng.hpp"
#include "hspg/selfcheck.hpp"

using namespace hspg;

namespace {

Parameters make_params(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (const double x : vals) v[i++] = x;
  return Parameters(std::move(v));
}

}  // namespace

TEST_CASE("omega on hand values") {
  const auto p2 = make_equal_partition(4, 2);
  CHECK(omega(make_params({3, 4, 0, 0}), p2) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(omega(make_params({0, 0, 0, 0}), p2) == 0.0);
  CHECK(omega(make_params({1, 0, 0, 1}), p2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(omega(make_params({1, 2}), p2), std::invalid_argument);
}

TEST_CASE("omega is absolutely homogeneous") {
  auto eng = make_engine(7);
  const auto part = make_equal_partition(9, 3);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd x(9);
    for (Eigen::Index i = 0; i < 9; ++i) x[i] = 3.0 * uniform_pm1(eng);
    const double c = 4.0 * uniform_pm1(eng);
    const double lhs = omega(Parameters(c * x), part);
    const double rhs = std::abs(c) * omega(Parameters(x), part);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("prox_group_l2 hand values") {
  const auto p1 = make_equal_partition(2, 1);
  // factor 1 - 2.5/5 = 0.5, cross-checked against the scalar-search oracle
  const auto shrunk = prox_group_l2(make_params({3, 4}), p1, 2.5);
  CHECK(shrunk.x[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(shrunk.x[1] == doctest::Approx(2.0).epsilon(1e-15));

  const auto zeroed = prox_group_l2(make_params({0.1, 0}), p1, 0.5);
  CHECK(zeroed.x[0] == 0.0);
  CHECK(zeroed.x[1] == 0.0);

  const auto same = prox_group_l2(make_params({0.3, -0.7}), p1, 0.0);
  CHECK(same.x[0] == 0.3);
  CHECK(same.x[1] == -0.7);

  CHECK_THROWS_AS(prox_group_l2(make_params({1, 2}), p1, -0.1), std::invalid_argument);
}

TEST_CASE("prox_group_l2 zero group maps to zero group") {
  const auto p1 = make_equal_partition(2, 1);
  const auto out = prox_group_l2(make_params({0, 0}), p1, 0.3);
  CHECK(out.x.isZero(0.0));
}

TEST_CASE("prox matches the scalar-search oracle and scales each group") {
  auto eng = make_engine(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + uniform_below(eng, 8);
    const auto part = make_equal_partition(n, 1 + uniform_below(eng, n));
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = 2.0 * uniform_pm1(eng);
    const double eta = 0.1 + uniform_unit(eng);
    const double lambda = uniform_unit(eng);
    const Parameters out = prox_group_l2(Parameters(x), part, eta * lambda);
    for (std::size_t g = 0; g < part.num_groups(); ++g) {
      const auto xg = part.slice(x, g);
      const auto og = part.slice(out.x, g);
      const double r = xg.norm();
      if (r == 0.0) {
        CHECK(og.isZero(0.0));
        continue;
      }
      // output is c * x_g with c in [0,1)
      const double c = og.norm() / r;
      CHECK(c >= 0.0);
      CHECK(c < 1.0 + 1e-15);
      CHECK((og - c * xg).norm() <= 1e-12 * (1.0 + r));
      // independent minimizer of the subproblem on the group ray
      const double c_star = prox_scalar_search(r, eta, lambda);
      CHECK((og - c_star * xg).norm() <= 1e-6);
    }
  }
}

TEST_CASE("half_space_project hand values") {
  const auto p1 = make_equal_partition(2, 1);
  const auto kept =
      half_space_project(make_params({0.5, 0.5}), make_params({1, 0}), p1, 0.0);
  CHECK(kept.x[0] == 0.5);
  CHECK(kept.x[1] == 0.5);

  const auto dropped =
      half_space_project(make_params({-0.1, 0.3}), make_params({1, 0}), p1, 0.0);
  CHECK(dropped.x.isZero(0.0));

  // 0.04 < 0.05 * 1^2: projected
  const auto eps_dropped =
      half_space_project(make_params({0.04, 0}), make_params({1, 0}), p1, 0.05);
  CHECK(eps_dropped.x.isZero(0.0));

  CHECK_THROWS_AS(half_space_project(make_params({1, 0}), make_params({1, 0}), p1, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(half_space_project(make_params({1, 0}), make_params({1, 0}), p1, -0.01),
                  std::invalid_argument);
}

TEST_CASE("half_space_project keeps ties and zero reference groups") {
  const auto p1 = make_equal_partition(2, 1);
  // inner product exactly epsilon * ||x_ref||^2
  const auto tie = half_space_project(make_params({0.05, 0}), make_params({1, 0}), p1, 0.05);
  CHECK(tie.x[0] == 0.05);
  // zero reference: 0 >= 0 holds, z passes through
  const auto thru = half_space_project(make_params({0.2, -0.3}), make_params({0, 0}), p1, 0.5);
  CHECK(thru.x[0] == 0.2);
  CHECK(thru.x[1] == -0.3);
}

TEST_CASE("half_space_project is idempotent") {
  auto eng = make_engine(13);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4 + uniform_below(eng, 8);
    const auto part = make_equal_partition(n, 1 + uniform_below(eng, 4));
    Eigen::VectorXd z(static_cast<Eigen::Index>(n)), xr(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      z[i] = 2.0 * uniform_pm1(eng);
      xr[i] = 2.0 * uniform_pm1(eng);
    }
    const double eps = uniform_unit(eng) * 0.99;
    const Parameters once = half_space_project(Parameters(z), Parameters(xr), part, eps);
    const Parameters twice = half_space_project(once, Parameters(xr), part, eps);
    CHECK(once.x == twice.x);
  }
}

TEST_CASE("grad_omega_on_support hand values") {
  const auto p1 = make_equal_partition(2, 1);
  const auto unit = grad_omega_on_support(make_params({3, 4}), p1);
  CHECK(unit.x[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(unit.x[1] == doctest::Approx(0.8).epsilon(1e-15));

  CHECK(grad_omega_on_support(make_params({0, 0}), p1).x.isZero(0.0));

  const auto neg = grad_omega_on_support(make_params({0, -2}), p1);
  CHECK(neg.x[0] == 0.0);
  CHECK(neg.x[1] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("gradient_mapping hand values") {
  const auto p1 = make_equal_partition(2, 1);
  const Parameters x = make_params({3, 4});
  const Parameters zero_grad = make_params({0, 0});

  // lambda = 0, grad 0: fixed point
  CHECK(gradient_mapping(x, 0.7, zero_grad, p1, 0.0).x.isZero(0.0));

  // lambda = 0: prox is the identity, xi equals the gradient
  const Parameters g = make_params({0.3, -1.2});
  const auto xi = gradient_mapping(x, 0.7, g, p1, 0.0);
  CHECK(xi.x[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(xi.x[1] == doctest::Approx(-1.2).epsilon(1e-12));

  // eta 1, lambda 2.5: xi = (3,4) - (1.5,2) = (1.5,2)
  const auto xi2 = gradient_mapping(x, 1.0, zero_grad, p1, 2.5);
  CHECK(xi2.x[0] == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(xi2.x[1] == doctest::Approx(2.0).epsilon(1e-14));

  CHECK_THROWS_AS(gradient_mapping(x, 0.0, g, p1, 1.0), std::invalid_argument);
}

TEST_CASE("gradient_mapping vanishes exactly at prox-gradient fixed points") {
  auto eng = make_engine(17);
  const auto part = make_equal_partition(6, 2);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd z(6);
    for (Eigen::Index i = 0; i < 6; ++i) z[i] = 3.0 * uniform_pm1(eng);
    const double eta = 0.2 + uniform_unit(eng);
    const double lambda = uniform_unit(eng);
    // y = prox(z) is the fixed point of the update with grad_f = (y - z)/eta
    const Parameters y = prox_group_l2(Parameters(z), part, eta * lambda);
    Parameters grad_f(Eigen::VectorXd((y.x - z) / eta));
    CHECK(gradient_mapping(y, eta, grad_f, part, lambda).x.norm() <=
          1e-12 * (1.0 + z.norm()));
    // and a nonzero perturbation of the gradient moves xi off zero
    grad_f.x[0] += 1.0;
    const auto xi = gradient_mapping(y, eta, grad_f, part, lambda);
    CHECK(xi.x.norm() > 1e-3);
  }
}

TEST_CASE("prox_group_l2 is nonexpansive on random pairs") {
  auto eng = make_engine(19);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 3 + uniform_below(eng, 9);
    const auto part = make_equal_partition(n, 1 + uniform_below(eng, 3));
    Eigen::VectorXd a(static_cast<Eigen::Index>(n)), b(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a[i] = 3.0 * uniform_pm1(eng);
      b[i] = 3.0 * uniform_pm1(eng);
    }
    const double thr = 2.0 * uniform_unit(eng);
    const double lhs =
        (prox_group_l2(Parameters(a), part, thr).x - prox_group_l2(Parameters(b), part, thr).x)
            .norm();
    CHECK(lhs <= (a - b).norm() + 1e-12);
  }
}

TEST_CASE("bias passes through prox and is zeroed by grad_omega") {
  const auto p1 = make_equal_partition(2, 1);
  Parameters p = make_params({3, 4});
  p.bias = -2.5;
  const auto out = prox_group_l2(p, p1, 2.5);
  CHECK(out.bias == -2.5);
  const auto g = grad_omega_on_support(p, p1);
  CHECK(g.bias == 0.0);
}
