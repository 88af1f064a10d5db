#include "hspg/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hspg/data.hpp"
#include "hspg/metrics.hpp"
#include "hspg/regularizer.hpp"
#include "hspg/rng.hpp"
#include "hspg/solvers.hpp"

namespace hspg {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Eigen::VectorXd random_vector(std::mt19937_64& eng, Eigen::Index n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * uniform_pm1(eng);
  return v;
}

Eigen::VectorXd random_direction(std::mt19937_64& eng, Eigen::Index n) {
  // rejection-sampled from the cube, normalized; avoids inverse-cdf normals
  while (true) {
    Eigen::VectorXd v = random_vector(eng, n);
    const double nrm = v.norm();
    if (nrm > 1e-3) return v / nrm;
  }
}

GroupPartition random_partition(std::mt19937_64& eng, std::size_t num_groups,
                                std::size_t max_group_size) {
  std::vector<GroupRange> ranges;
  std::size_t start = 0;
  for (std::size_t g = 0; g < num_groups; ++g) {
    const std::size_t len = 1 + uniform_below(eng, max_group_size);
    ranges.push_back({start, len});
    start += len;
  }
  return GroupPartition(std::move(ranges), start);
}

// N identical copies of f_i(x) = 1/2 ||x - center||^2, so every batch
// gradient equals x - center and the shared Lipschitz constant is 1.
class QuadraticProblem : public Problem {
 public:
  QuadraticProblem(Eigen::VectorXd center, std::size_t copies)
      : center_(std::move(center)), copies_(copies) {}
  std::size_t num_instances() const override { return copies_; }
  std::size_t dimension() const override { return static_cast<std::size_t>(center_.size()); }
  double batch_value(const Parameters& p, Batch) const override {
    return 0.5 * (p.x - center_).squaredNorm();
  }
  ValueGrad batch_value_grad(const Parameters& p, Batch batch) const override {
    ValueGrad out;
    out.value = batch_value(p, batch);
    out.grad.x = p.x - center_;
    return out;
  }
  double lipschitz_estimate() const override { return 1.0; }

 private:
  Eigen::VectorXd center_;
  std::size_t copies_;
};

// Reports a caller-chosen gradient regardless of batch; lets the suites push
// constructed trial points through the real step implementations.
class FixedGradientProblem : public Problem {
 public:
  explicit FixedGradientProblem(Eigen::VectorXd grad) : grad_(std::move(grad)) {}
  std::size_t num_instances() const override { return 4; }
  std::size_t dimension() const override { return static_cast<std::size_t>(grad_.size()); }
  double batch_value(const Parameters&, Batch) const override { return 0.0; }
  ValueGrad batch_value_grad(const Parameters&, Batch) const override {
    ValueGrad out;
    out.grad.x = grad_;
    return out;
  }
  double lipschitz_estimate() const override { return 1.0; }

 private:
  Eigen::VectorXd grad_;
};

}  // namespace

double prox_scalar_search(double group_norm, double eta, double lambda) {
  const double r2 = group_norm * group_norm;
  const auto phi = [&](double c) {
    return (c - 1.0) * (c - 1.0) * r2 / (2.0 * eta) + lambda * c * group_norm;
  };
  double lo = 0.0, hi = 1.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
  double f1 = phi(c1), f2 = phi(c2);
  while (hi - lo > 1e-13) {
    if (f1 <= f2) {
      hi = c2;
      c2 = c1;
      f2 = f1;
      c1 = hi - gr * (hi - lo);
      f1 = phi(c1);
    } else {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + gr * (hi - lo);
      f2 = phi(c2);
    }
  }
  const double c = 0.5 * (lo + hi);
  // the constrained minimum can sit at the ray origin
  return phi(0.0) <= phi(c) ? 0.0 : c;
}

SuiteResult prox_oracle_suite(std::size_t trials, std::uint64_t seed) {
  auto eng = make_engine(seed, 11);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const GroupPartition part = random_partition(eng, 1 + uniform_below(eng, 4), 5);
    const Eigen::Index n = static_cast<Eigen::Index>(part.dim());
    Parameters x_hat(random_vector(eng, n, 2.0));
    const double eta = 0.05 + uniform_unit(eng) * 2.0;
    const double lambda = uniform_unit(eng) * 1.5;
    const Parameters p = prox_group_l2(x_hat, part, eta * lambda);
    for (std::size_t g = 0; g < part.num_groups(); ++g) {
      const auto xg = part.slice(x_hat.x, g);
      const double r = xg.norm();
      if (r == 0.0) continue;
      const double c = prox_scalar_search(r, eta, lambda);
      const double err = (part.slice(p.x, g) - c * xg).norm();
      worst = std::max(worst, err);
    }
  }
  return {"prox_oracle", worst <= 1e-6,
          std::to_string(trials) + " triples, worst |closed-form - scalar search| = " +
              fmt(worst)};
}

SuiteResult prox_nonexpansive_suite(std::size_t trials, std::uint64_t seed) {
  auto eng = make_engine(seed, 12);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const GroupPartition part = random_partition(eng, 1 + uniform_below(eng, 4), 5);
    const Eigen::Index n = static_cast<Eigen::Index>(part.dim());
    Parameters a(random_vector(eng, n, 3.0));
    Parameters b(random_vector(eng, n, 3.0));
    const double thr = uniform_unit(eng) * 2.0;
    const double lhs = (prox_group_l2(a, part, thr).x - prox_group_l2(b, part, thr).x).norm();
    const double rhs = (a.x - b.x).norm();
    worst = std::max(worst, lhs - rhs);
  }
  return {"prox_nonexpansive", worst <= 1e-12,
          std::to_string(trials) + " pairs, worst ||prox(a)-prox(b)|| - ||a-b|| = " +
              fmt(worst)};
}

namespace {

double gradient_check_worst(const Problem& problem, std::size_t points, std::uint64_t seed) {
  auto eng = make_engine(seed, 13);
  const Eigen::Index n = static_cast<Eigen::Index>(problem.dimension());
  std::vector<std::size_t> all(problem.num_instances());
  std::iota(all.begin(), all.end(), std::size_t{0});
  double worst = 0.0;
  for (std::size_t t = 0; t < points; ++t) {
    Parameters x(random_vector(eng, n, 1.5));
    if (problem.has_bias()) x.bias = uniform_pm1(eng);
    const ValueGrad vg = problem.batch_value_grad(x, all);
    Eigen::VectorXd fd(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = 1e-6 * (1.0 + std::abs(x.x[j]));
      Parameters xp = x, xm = x;
      xp.x[j] += h;
      xm.x[j] -= h;
      fd[j] = (problem.batch_value(xp, all) - problem.batch_value(xm, all)) / (2.0 * h);
    }
    double err = (vg.grad.x - fd).norm() / std::max(1e-8, fd.norm());
    if (problem.has_bias()) {
      const double h = 1e-6;
      Parameters xp = x, xm = x;
      *xp.bias += h;
      *xm.bias -= h;
      const double fdb = (problem.batch_value(xp, all) - problem.batch_value(xm, all)) / (2.0 * h);
      err = std::max(err, std::abs(*vg.grad.bias - fdb) / std::max(1e-8, std::abs(fdb)));
    }
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace

SuiteResult gradient_check_suite(const Problem& problem, std::size_t points,
                                 std::uint64_t seed, double rtol) {
  const double worst = gradient_check_worst(problem, points, seed);
  return {"gradient_check", worst < rtol,
          std::to_string(points) + " points, worst relative error = " + fmt(worst)};
}

SuiteResult gradient_check_ls_suite(std::size_t instances, std::uint64_t seed) {
  auto eng = make_engine(seed, 14);
  double worst = 0.0;
  for (std::size_t t = 0; t < instances; ++t) {
    const std::size_t rows = 3 + uniform_below(eng, 6);
    const std::size_t cols = 2 + uniform_below(eng, 5);
    RowMatrixXd A(rows, cols);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = uniform_pm1(eng);
    const Eigen::VectorXd y = random_vector(eng, static_cast<Eigen::Index>(rows));
    const LeastSquaresProblem p(A, y);
    worst = std::max(worst, gradient_check_worst(p, 2, seed ^ (t + 1)));
  }
  return {"gradient_ls", worst < 1e-5,
          std::to_string(instances) + " random instances, worst relative error = " + fmt(worst)};
}

SuiteResult gradient_check_logistic_suite(std::size_t instances, std::uint64_t seed) {
  double worst = 0.0;
  for (std::size_t t = 0; t < instances; ++t) {
    const std::size_t rows = 4 + (t % 8);
    const std::size_t cols = 3 + (t % 6);
    const LogisticProblem p = make_test_logistic(rows, cols, seed ^ (0xabc + t));
    worst = std::max(worst, gradient_check_worst(p, 2, seed ^ (t + 7)));
  }
  return {"gradient_logistic", worst < 1e-5,
          std::to_string(instances) + " random instances, worst relative error = " + fmt(worst)};
}

SuiteResult composite_gradient_suite(std::size_t points, std::uint64_t seed,
                                     GradOmegaFn grad_omega_fn) {
  if (grad_omega_fn == nullptr) grad_omega_fn = &grad_omega_on_support;
  auto eng = make_engine(seed, 21);
  double worst = 0.0;
  for (std::size_t t = 0; t < points; ++t) {
    const std::size_t dim = 6 + (t % 5);
    const LogisticProblem p = make_test_logistic(12 + (t % 9), dim, seed ^ (0x77 + t));
    const GroupPartition part = make_equal_partition(dim, 2 + (t % 2));
    const double lambda = 0.1 + uniform_unit(eng);
    std::vector<std::size_t> all(p.num_instances());
    std::iota(all.begin(), all.end(), std::size_t{0});
    // keep every group clear of the kink
    Parameters x(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)));
    for (std::size_t g = 0; g < part.num_groups(); ++g)
      part.slice(x.x, g) = (0.5 + uniform_unit(eng)) *
                           random_direction(eng, static_cast<Eigen::Index>(part.group(g).length));
    const Parameters gf = p.batch_gradient(x, all);
    const Parameters go = grad_omega_fn(x, part);
    const Eigen::VectorXd analytic = gf.x + lambda * go.x;
    Eigen::VectorXd fd(static_cast<Eigen::Index>(dim));
    for (Eigen::Index j = 0; j < fd.size(); ++j) {
      const double h = 1e-6 * (1.0 + std::abs(x.x[j]));
      Parameters xp = x, xm = x;
      xp.x[j] += h;
      xm.x[j] -= h;
      const double up = p.batch_value(xp, all) + lambda * omega(xp, part);
      const double dn = p.batch_value(xm, all) + lambda * omega(xm, part);
      fd[j] = (up - dn) / (2.0 * h);
    }
    worst = std::max(worst, (analytic - fd).norm() / std::max(1e-8, fd.norm()));
  }
  return {"gradient_composite", worst < 1e-5,
          std::to_string(points) + " points, worst relative error = " + fmt(worst)};
}

SuiteResult superset_suite(std::size_t draws, std::uint64_t seed) {
  auto eng = make_engine(seed, 16);
  std::size_t zeroed = 0;
  for (std::size_t t = 0; t < draws; ++t) {
    const GroupPartition part = random_partition(eng, 2 + uniform_below(eng, 4), 5);
    const Eigen::Index n = static_cast<Eigen::Index>(part.dim());
    // iterate with every group nonzero
    Parameters x(Eigen::VectorXd::Zero(n));
    for (std::size_t g = 0; g < part.num_groups(); ++g)
      part.slice(x.x, g) = (0.5 + 1.5 * uniform_unit(eng)) *
                           random_direction(eng, static_cast<Eigen::Index>(part.group(g).length));
    const double alpha = 0.01 + uniform_unit(eng) * 0.99;
    const double lambda = 0.1 + uniform_unit(eng) * 1.9;
    const double eps = uniform_unit(eng) * 0.999;
    const std::size_t target = uniform_below(eng, part.num_groups());

    // gradient chosen so the prox trial point of the target group lands
    // inside the ball of radius alpha*lambda
    Eigen::VectorXd grad = random_vector(eng, n);
    const auto tg = part.group(target);
    const Eigen::Index ts = static_cast<Eigen::Index>(tg.start);
    const Eigen::Index tl = static_cast<Eigen::Index>(tg.length);
    const double radius = alpha * lambda *
                          std::pow(uniform_unit(eng), 1.0 / static_cast<double>(tg.length));
    const Eigen::VectorXd x_hat_target = radius * random_direction(eng, tl);
    grad.segment(ts, tl) = (x.x.segment(ts, tl) - x_hat_target) / alpha;

    FixedGradientProblem problem(grad);
    SolverConfig config;
    config.kind = SolverKind::hspg;
    config.lambda = lambda;
    config.epsilon = eps;
    config.batch_size = problem.num_instances();
    config.max_epochs = 1;
    SolverState state;
    state.x = x;
    state.alpha = alpha;
    state.stage = Stage::group_sparsity;
    std::vector<std::size_t> all(problem.num_instances());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const Parameters next = half_space_step(state, problem, part, config, all);
    if (part.slice(next.x, target).isZero(0.0)) ++zeroed;
  }
  return {"superset", zeroed == draws,
          std::to_string(zeroed) + "/" + std::to_string(draws) +
              " in-ball trial points projected to zero"};
}

SuiteResult sufficient_decrease_suite(const Problem& problem, const GroupPartition& partition,
                         double lambda, double epsilon, std::size_t steps,
                         std::size_t warm_epochs, std::uint64_t seed) {
  const double l_f = problem.lipschitz_estimate();
  std::vector<std::size_t> all(problem.num_instances());
  std::iota(all.begin(), all.end(), std::size_t{0});

  // warm start: short two-stage run, so noise-scale groups are already
  // projected away and the remaining support has healthy norms
  SolverConfig warm;
  warm.kind = SolverKind::hspg;
  warm.lambda = lambda;
  warm.epsilon = epsilon;
  warm.step.alpha0 = l_f > 0.0 ? 1.0 / l_f : 0.1;
  warm.batch_size = std::min<std::size_t>(256, problem.num_instances());
  warm.max_epochs = 2 * std::max<std::size_t>(warm_epochs, 1);
  const std::size_t steps_per_epoch =
      (problem.num_instances() + warm.batch_size - 1) / warm.batch_size;
  warm.n_p = std::max<std::size_t>(warm_epochs, 1) * steps_per_epoch;
  warm.seed = seed;
  warm.record_wall_time = false;
  Parameters x = run(warm, problem, partition,
                     Parameters::zeros(static_cast<Eigen::Index>(problem.dimension())))
                     .final;

  SolverConfig config;
  config.kind = SolverKind::hspg;
  config.lambda = lambda;
  config.epsilon = epsilon;
  config.batch_size = problem.num_instances();
  config.max_epochs = 1;

  double worst_slack = std::numeric_limits<double>::infinity();
  std::size_t projections = 0;
  std::size_t executed = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    const GroupSupport before = support_of(x.x, partition);
    if (before.nonzero_groups.empty()) break;
    ++executed;
    double min_norm = std::numeric_limits<double>::infinity();
    for (const std::size_t g : before.nonzero_groups)
      min_norm = std::min(min_norm, partition.slice(x.x, g).norm());
    // Lipschitz bound for the restricted composite gradient near x; the
    // factor 2 keeps it valid along the whole step segment
    const double l_psi = l_f + 2.0 * lambda / min_norm;
    const double alpha = 0.9 * std::min(2.0 * (1.0 - epsilon) / l_psi, 1.0 / l_psi);

    SolverState state;
    state.x = x;
    state.alpha = alpha;
    state.stage = Stage::group_sparsity;
    const Parameters next = half_space_step(state, problem, partition, config, all);

    // restricted composite gradient at x
    const ValueGrad vg = problem.batch_value_grad(x, all);
    const Parameters gom = grad_omega_on_support(x, partition);
    Eigen::VectorXd grad_psi = vg.grad.x + lambda * gom.x;
    for (const std::size_t g : before.zero_groups) partition.slice(grad_psi, g).setZero();

    const double psi_x = vg.value + lambda * omega(x, partition);
    const double psi_next = problem.batch_value(next, all) + lambda * omega(next, partition);

    double kept_term = 0.0, projected_term = 0.0;
    const GroupSupport after = support_of(next.x, partition);
    for (const std::size_t g : before.nonzero_groups) {
      const bool now_zero =
          std::binary_search(after.zero_groups.begin(), after.zero_groups.end(), g);
      if (now_zero) {
        ++projections;
        projected_term += partition.slice(x.x, g).squaredNorm();
      } else {
        kept_term += partition.slice(grad_psi, g).squaredNorm();
      }
    }
    const double bound = psi_x - (alpha - alpha * alpha * l_psi / 2.0) * kept_term -
                         ((1.0 - epsilon) / alpha - l_psi / 2.0) * projected_term;
    worst_slack = std::min(worst_slack, bound - psi_next);

    // descent direction whenever the step moves
    Eigen::VectorXd d = (next.x - x.x) / alpha;
    if (!d.isZero(0.0) && d.dot(grad_psi) >= 0.0)
      return {"sufficient_decrease", false,
              "step " + std::to_string(t) + ": d'grad_psi = " + fmt(d.dot(grad_psi))};
    x = next;
  }
  if (executed < steps)
    return {"sufficient_decrease", false,
            "iterate lost all nonzero groups after " + std::to_string(executed) +
                " steps; suite needs " + std::to_string(steps)};
  const bool pass = worst_slack >= -1e-9;
  return {"sufficient_decrease", pass,
          std::to_string(executed) + " full-batch steps, " + std::to_string(projections) +
              " projections, worst sufficient-decrease slack = " + fmt(worst_slack)};
}

SuiteResult identification_suite(std::size_t instances, std::uint64_t seed) {
  auto eng = make_engine(seed, 17);
  std::size_t identified = 0;
  std::size_t total = 0;
  for (std::size_t t = 0; t < instances; ++t) {
    const GroupPartition part = random_partition(eng, 3 + uniform_below(eng, 4), 5);
    const Eigen::Index n = static_cast<Eigen::Index>(part.dim());
    // ground truth with at least one zero and one nonzero group
    Parameters x_star(Eigen::VectorXd::Zero(n));
    std::vector<std::size_t> zero_groups;
    do {
      zero_groups.clear();
      x_star.x.setZero();
      for (std::size_t g = 0; g < part.num_groups(); ++g) {
        if (uniform_unit(eng) < 0.5) {
          zero_groups.push_back(g);
        } else {
          part.slice(x_star.x, g) =
              (0.5 + 1.5 * uniform_unit(eng)) *
              random_direction(eng, static_cast<Eigen::Index>(part.group(g).length));
        }
      }
    } while (zero_groups.empty() || zero_groups.size() == part.num_groups());

    QuadraticProblem problem(x_star.x, 3);
    const double big_l = 1.0;
    const double lambda = 0.2 + uniform_unit(eng) * 0.8;
    const double eps = uniform_unit(eng) * 0.5;
    const double alpha = 0.05 + uniform_unit(eng) * 0.95;  // <= 1/L

    // strict complementarity margin of the zero groups at the target
    std::vector<std::size_t> all(problem.num_instances());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const Parameters grad_at_star = problem.batch_gradient(x_star, all);
    double margin = std::numeric_limits<double>::infinity();
    for (const std::size_t g : zero_groups)
      margin = std::min(margin, 0.5 * (lambda - part.slice(grad_at_star.x, g).norm()));
    if (!(margin > 0.0)) continue;

    const double radius = 2.0 * alpha * margin / (1.0 - eps + alpha * big_l);
    Parameters x_k = x_star;
    x_k.x += (radius * std::pow(uniform_unit(eng), 1.0 / static_cast<double>(n))) *
             random_direction(eng, n);

    SolverConfig config;
    config.kind = SolverKind::hspg;
    config.lambda = lambda;
    config.epsilon = eps;
    config.batch_size = problem.num_instances();
    config.max_epochs = 1;
    SolverState state;
    state.x = x_k;
    state.alpha = alpha;
    state.stage = Stage::group_sparsity;
    const Parameters next = half_space_step(state, problem, part, config, all);

    ++total;
    bool ok = true;
    for (const std::size_t g : zero_groups)
      if (!part.slice(next.x, g).isZero(0.0)) ok = false;
    if (ok) ++identified;
  }
  return {"identification", identified == total && total > 0,
          std::to_string(identified) + "/" + std::to_string(total) +
              " in-ball iterates identified the target zero groups in one step"};
}

LogisticProblem make_test_logistic(std::size_t num_instances, std::size_t dim,
                                   std::uint64_t seed) {
  auto eng = make_engine(seed, 18);
  const Eigen::VectorXd plane = random_vector(eng, static_cast<Eigen::Index>(dim));
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd labels(static_cast<Eigen::Index>(num_instances));
  for (std::size_t i = 0; i < num_instances; ++i) {
    double margin = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < dim; ++j) {
      if (uniform_unit(eng) < 0.4) {
        const double v = uniform_pm1(eng);
        trip.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
        margin += v * plane[static_cast<Eigen::Index>(j)];
        any = true;
      }
    }
    if (!any) {  // keep every row nonempty
      trip.emplace_back(static_cast<int>(i), 0, 1.0);
      margin += plane[0];
    }
    // mostly separable labels with a little noise
    labels[static_cast<Eigen::Index>(i)] =
        (uniform_unit(eng) < 0.9 ? (margin >= 0.0) : (margin < 0.0)) ? 1.0 : -1.0;
  }
  SparseRowMatrix D(static_cast<Eigen::Index>(num_instances), static_cast<Eigen::Index>(dim));
  D.setFromTriplets(trip.begin(), trip.end());
  return LogisticProblem(std::move(D), std::move(labels), true);
}

std::vector<SuiteResult> run_all_suites(const std::string& dataset_path, std::uint64_t seed) {
  std::vector<SuiteResult> results;
  results.push_back(prox_oracle_suite(1000, seed));
  results.push_back(prox_nonexpansive_suite(1000, seed));
  {
    SuiteResult r = gradient_check_ls_suite(100, seed);
    results.push_back(r);
  }
  results.push_back(gradient_check_logistic_suite(100, seed));
  results.push_back(composite_gradient_suite(100, seed));
  results.push_back(superset_suite(10000, seed));
  if (!dataset_path.empty()) {
    const LogisticProblem p = load_libsvm_problem(dataset_path);
    const GroupPartition part = make_equal_partition(p.dimension(), 10);
    const double lambda = 100.0 / static_cast<double>(p.num_instances());
    results.push_back(sufficient_decrease_suite(p, part, lambda, 0.05, 100, 3, seed));
  } else {
    const LogisticProblem p = make_test_logistic(600, 40, seed);
    const GroupPartition part = make_equal_partition(p.dimension(), 8);
    results.push_back(sufficient_decrease_suite(p, part, 10.0 / 600.0, 0.05, 100, 3, seed));
  }
  results.push_back(identification_suite(100, seed));
  return results;
}

}  // namespace hspg
