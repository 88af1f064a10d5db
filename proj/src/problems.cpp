#include "hspg/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace hspg {

namespace {

// log(1 + exp(-z)) without overflow
double softplus_neg(double z) {
  if (z >= 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

// sigma(-z) = 1 / (1 + exp(z)) without overflow
double sigmoid_neg(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

std::vector<std::size_t> sorted_batch(Batch batch, std::size_t n_instances, const char* who) {
  if (batch.empty()) throw std::invalid_argument(std::string(who) + ": empty batch");
  std::vector<std::size_t> idx(batch.begin(), batch.end());
  std::sort(idx.begin(), idx.end());
  if (idx.back() >= n_instances)
    throw std::invalid_argument(std::string(who) + ": batch index out of range");
  return idx;
}

}  // namespace

double Problem::full_value(const Parameters& p) const {
  std::vector<std::size_t> all(num_instances());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return batch_value(p, all);
}

ValueGrad Problem::full_value_grad(const Parameters& p) const {
  std::vector<std::size_t> all(num_instances());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return batch_value_grad(p, all);
}

LeastSquaresProblem::LeastSquaresProblem(RowMatrixXd A, Eigen::VectorXd y)
    : A_(std::move(A)), y_(std::move(y)) {
  if (A_.rows() == 0 || A_.cols() == 0)
    throw std::invalid_argument("LeastSquaresProblem: empty data");
  if (A_.rows() != y_.size())
    throw std::invalid_argument("LeastSquaresProblem: row count differs from targets");
}

double LeastSquaresProblem::batch_value(const Parameters& p, Batch batch) const {
  const auto idx = sorted_batch(batch, num_instances(), "ls_batch_value");
  if (p.x.size() != A_.cols())
    throw std::invalid_argument("ls_batch_value: dimension mismatch");
  double acc = 0.0;
  for (const std::size_t i : idx) {
    const double r = A_.row(static_cast<Eigen::Index>(i)).dot(p.x) -
                     y_[static_cast<Eigen::Index>(i)];
    acc += 0.5 * r * r;
  }
  return acc / static_cast<double>(idx.size());
}

ValueGrad LeastSquaresProblem::batch_value_grad(const Parameters& p, Batch batch) const {
  const auto idx = sorted_batch(batch, num_instances(), "ls_batch_value_grad");
  if (p.x.size() != A_.cols())
    throw std::invalid_argument("ls_batch_value_grad: dimension mismatch");
  ValueGrad out;
  out.grad.x = Eigen::VectorXd::Zero(A_.cols());
  for (const std::size_t i : idx) {
    const auto row = A_.row(static_cast<Eigen::Index>(i));
    const double r = row.dot(p.x) - y_[static_cast<Eigen::Index>(i)];
    out.value += 0.5 * r * r;
    out.grad.x += r * row.transpose();
  }
  const double inv = 1.0 / static_cast<double>(idx.size());
  out.value *= inv;
  out.grad.x *= inv;
  return out;
}

double LeastSquaresProblem::lipschitz_estimate() const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < A_.rows(); ++i)
    m = std::max(m, A_.row(i).squaredNorm());
  return m;
}

LogisticProblem::LogisticProblem(SparseRowMatrix features, Eigen::VectorXd labels,
                                 bool with_bias)
    : features_(std::move(features)), labels_(std::move(labels)), with_bias_(with_bias) {
  if (features_.rows() == 0)
    throw std::invalid_argument("LogisticProblem: no instances");
  if (features_.rows() != labels_.size())
    throw std::invalid_argument("LogisticProblem: row count differs from labels");
  for (Eigen::Index i = 0; i < labels_.size(); ++i)
    if (labels_[i] != 1.0 && labels_[i] != -1.0)
      throw std::invalid_argument("LogisticProblem: label not in {-1,+1}");
  features_.makeCompressed();
  lipschitz_ = 0.0;
  for (Eigen::Index i = 0; i < features_.rows(); ++i) {
    double sq = 0.0;
    for (SparseRowMatrix::InnerIterator it(features_, i); it; ++it)
      sq += it.value() * it.value();
    lipschitz_ = std::max(lipschitz_, sq / 4.0);
  }
}

double LogisticProblem::batch_value(const Parameters& p, Batch batch) const {
  const auto idx = sorted_batch(batch, num_instances(), "logistic_batch_value");
  if (p.x.size() != features_.cols())
    throw std::invalid_argument("logistic_batch_value: dimension mismatch");
  const double b = (with_bias_ && p.bias) ? *p.bias : 0.0;
  double acc = 0.0;
  for (const std::size_t i : idx) {
    const Eigen::Index row = static_cast<Eigen::Index>(i);
    double margin = b;
    for (SparseRowMatrix::InnerIterator it(features_, row); it; ++it)
      margin += it.value() * p.x[it.index()];
    acc += softplus_neg(labels_[row] * margin);
  }
  return acc / static_cast<double>(idx.size());
}

ValueGrad LogisticProblem::batch_value_grad(const Parameters& p, Batch batch) const {
  const auto idx = sorted_batch(batch, num_instances(), "logistic_batch_value_grad");
  if (p.x.size() != features_.cols())
    throw std::invalid_argument("logistic_batch_value_grad: dimension mismatch");
  const double b = (with_bias_ && p.bias) ? *p.bias : 0.0;
  ValueGrad out;
  out.grad.x = Eigen::VectorXd::Zero(features_.cols());
  double grad_b = 0.0;
  for (const std::size_t i : idx) {
    const Eigen::Index row = static_cast<Eigen::Index>(i);
    const double l = labels_[row];
    double margin = b;
    for (SparseRowMatrix::InnerIterator it(features_, row); it; ++it)
      margin += it.value() * p.x[it.index()];
    const double z = l * margin;
    out.value += softplus_neg(z);
    const double coef = -l * sigmoid_neg(z);
    for (SparseRowMatrix::InnerIterator it(features_, row); it; ++it)
      out.grad.x[it.index()] += coef * it.value();
    grad_b += coef;
  }
  const double inv = 1.0 / static_cast<double>(idx.size());
  out.value *= inv;
  out.grad.x *= inv;
  if (with_bias_) out.grad.bias = grad_b * inv;
  return out;
}

double LogisticProblem::lipschitz_estimate() const { return lipschitz_; }

}  // namespace hspg
