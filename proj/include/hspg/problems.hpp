#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <span>

#include "hspg/parameters.hpp"

namespace hspg {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Batch = std::span<const std::size_t>;

struct ValueGrad {
  double value = 0.0;
  Parameters grad;
};

/// Finite-sum objective f = (1/N) sum_i f_i with closed-form batch gradients.
/// Batch quantities average the per-instance values over the batch, summed in
/// ascending index order so that seeded runs are bit-reproducible and a
/// full-index batch equals the full gradient exactly.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::size_t num_instances() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual bool has_bias() const { return false; }

  virtual double batch_value(const Parameters& p, Batch batch) const = 0;
  virtual ValueGrad batch_value_grad(const Parameters& p, Batch batch) const = 0;

  /// Per-instance gradient Lipschitz bound; 0 on degenerate all-zero data.
  virtual double lipschitz_estimate() const = 0;

  Parameters batch_gradient(const Parameters& p, Batch batch) const {
    return batch_value_grad(p, batch).grad;
  }

  double full_value(const Parameters& p) const;
  ValueGrad full_value_grad(const Parameters& p) const;
};

/// f_i(x) = 1/2 (a_i' x - y_i)^2 with dense rows.
class LeastSquaresProblem : public Problem {
 public:
  LeastSquaresProblem(RowMatrixXd A, Eigen::VectorXd y);

  std::size_t num_instances() const override { return static_cast<std::size_t>(A_.rows()); }
  std::size_t dimension() const override { return static_cast<std::size_t>(A_.cols()); }
  double batch_value(const Parameters& p, Batch batch) const override;
  ValueGrad batch_value_grad(const Parameters& p, Batch batch) const override;
  double lipschitz_estimate() const override;  // max_i ||a_i||^2

  const RowMatrixXd& matrix() const { return A_; }
  const Eigen::VectorXd& targets() const { return y_; }

 private:
  RowMatrixXd A_;
  Eigen::VectorXd y_;
};

/// f_i(x, b) = log(1 + exp(-l_i (x' d_i + b))) with sparse rows and labels in
/// {-1, +1}. Values use the softplus form, stable for |margin| up to 1e4 and
/// beyond.
class LogisticProblem : public Problem {
 public:
  LogisticProblem(SparseRowMatrix features, Eigen::VectorXd labels, bool with_bias = true);

  std::size_t num_instances() const override {
    return static_cast<std::size_t>(features_.rows());
  }
  std::size_t dimension() const override { return static_cast<std::size_t>(features_.cols()); }
  bool has_bias() const override { return with_bias_; }
  double batch_value(const Parameters& p, Batch batch) const override;
  ValueGrad batch_value_grad(const Parameters& p, Batch batch) const override;
  double lipschitz_estimate() const override;  // max_i ||d_i||^2 / 4

  const SparseRowMatrix& features() const { return features_; }
  const Eigen::VectorXd& labels() const { return labels_; }

 private:
  SparseRowMatrix features_;
  Eigen::VectorXd labels_;
  bool with_bias_;
  double lipschitz_;
};

}  // namespace hspg
