#pragma once

#include <Eigen/Core>
#include <optional>

namespace hspg {

/// Dense iterate: the regularized coordinates x plus an optional
/// unregularized intercept. The intercept never enters the penalty and is
/// never counted in group sparsity.
struct Parameters {
  Eigen::VectorXd x;
  std::optional<double> bias;

  Parameters() = default;
  explicit Parameters(Eigen::VectorXd v) : x(std::move(v)) {}
  Parameters(Eigen::VectorXd v, double b) : x(std::move(v)), bias(b) {}

  static Parameters zeros(Eigen::Index n, bool with_bias = false) {
    Parameters p(Eigen::VectorXd::Zero(n));
    if (with_bias) p.bias = 0.0;
    return p;
  }

  Eigen::Index dim() const { return x.size(); }

  double squared_norm() const {
    double s = x.squaredNorm();
    if (bias) s += *bias * *bias;
    return s;
  }
};

}  // namespace hspg
