#include "hspg/regularizer.hpp"

#include <stdexcept>

namespace hspg {

namespace {

void check_dim(const Parameters& p, const GroupPartition& partition, const char* who) {
  if (static_cast<std::size_t>(p.x.size()) != partition.dim())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

}  // namespace

double omega(const Parameters& p, const GroupPartition& partition) {
  check_dim(p, partition, "omega");
  double total = 0.0;
  for (std::size_t g = 0; g < partition.num_groups(); ++g)
    total += partition.slice(p.x, g).norm();
  return total;
}

Parameters prox_group_l2(const Parameters& x_hat, const GroupPartition& partition,
                         double threshold) {
  check_dim(x_hat, partition, "prox_group_l2");
  if (threshold < 0.0) throw std::invalid_argument("prox_group_l2: negative threshold");
  Parameters out = x_hat;
  for (std::size_t g = 0; g < partition.num_groups(); ++g) {
    auto seg = partition.slice(out.x, g);
    const double nrm = seg.norm();
    if (nrm <= threshold)
      seg.setZero();
    else if (threshold > 0.0)
      seg *= 1.0 - threshold / nrm;
  }
  return out;
}

Parameters half_space_project(const Parameters& z, const Parameters& x_ref,
                              const GroupPartition& partition, double epsilon) {
  check_dim(z, partition, "half_space_project");
  check_dim(x_ref, partition, "half_space_project");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw std::invalid_argument("half_space_project: epsilon outside [0,1)");
  Parameters out = z;
  for (std::size_t g = 0; g < partition.num_groups(); ++g) {
    const auto ref = partition.slice(x_ref.x, g);
    auto seg = partition.slice(out.x, g);
    // strict < projects; ties keep the group
    if (seg.dot(ref) < epsilon * ref.squaredNorm()) seg.setZero();
  }
  return out;
}

Parameters grad_omega_on_support(const Parameters& p, const GroupPartition& partition) {
  check_dim(p, partition, "grad_omega_on_support");
  Parameters out = p;
  if (out.bias) out.bias = 0.0;
  for (std::size_t g = 0; g < partition.num_groups(); ++g) {
    auto seg = partition.slice(out.x, g);
    const double nrm = seg.norm();
    if (nrm == 0.0)
      seg.setZero();  // zero group stays an exact zero
    else
      seg /= nrm;
  }
  return out;
}

Parameters gradient_mapping(const Parameters& x, double eta, const Parameters& grad_f,
                            const GroupPartition& partition, double lambda) {
  check_dim(x, partition, "gradient_mapping");
  if (!(eta > 0.0)) throw std::invalid_argument("gradient_mapping: eta must be positive");
  if (lambda < 0.0) throw std::invalid_argument("gradient_mapping: negative lambda");
  Parameters trial = x;
  trial.x -= eta * grad_f.x;
  if (trial.bias && grad_f.bias) *trial.bias -= eta * *grad_f.bias;
  const Parameters prox = prox_group_l2(trial, partition, eta * lambda);
  Parameters xi = x;
  xi.x = (x.x - prox.x) / eta;
  if (xi.bias && prox.bias) xi.bias = (*x.bias - *prox.bias) / eta;
  return xi;
}

}  // namespace hspg
