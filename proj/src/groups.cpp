#include "hspg/groups.hpp"

#include <stdexcept>

namespace hspg {

GroupPartition::GroupPartition(std::vector<GroupRange> groups, std::size_t n)
    : groups_(std::move(groups)), n_(n) {
  if (n_ == 0) throw std::invalid_argument("GroupPartition: n must be positive");
  std::size_t covered = 0;
  for (const auto& g : groups_) {
    if (g.length == 0) throw std::invalid_argument("GroupPartition: empty group");
    if (g.start != covered)
      throw std::invalid_argument("GroupPartition: groups must tile 0..n-1 contiguously");
    covered += g.length;
  }
  if (covered != n_)
    throw std::invalid_argument("GroupPartition: groups do not cover 0..n-1");
}

GroupPartition make_equal_partition(std::size_t n, std::size_t num_groups) {
  if (n == 0 || num_groups == 0)
    throw std::invalid_argument("make_equal_partition: n and num_groups must be positive");
  if (num_groups > n)
    throw std::invalid_argument("make_equal_partition: num_groups exceeds n");
  const std::size_t base = n / num_groups;
  const std::size_t extra = n % num_groups;
  std::vector<GroupRange> groups;
  groups.reserve(num_groups);
  std::size_t start = 0;
  for (std::size_t g = 0; g < num_groups; ++g) {
    const std::size_t len = base + (g < extra ? 1 : 0);
    groups.push_back({start, len});
    start += len;
  }
  return GroupPartition(std::move(groups), n);
}

GroupSupport support_of(const Eigen::VectorXd& x, const GroupPartition& partition) {
  if (static_cast<std::size_t>(x.size()) != partition.dim())
    throw std::invalid_argument("support_of: dimension mismatch");
  GroupSupport s;
  s.num_groups = partition.num_groups();
  for (std::size_t g = 0; g < partition.num_groups(); ++g) {
    const auto& r = partition.group(g);
    bool all_zero = true;
    for (std::size_t j = r.start; j < r.start + r.length; ++j) {
      if (x[static_cast<Eigen::Index>(j)] != 0.0) {
        all_zero = false;
        break;
      }
    }
    (all_zero ? s.zero_groups : s.nonzero_groups).push_back(g);
  }
  return s;
}

}  // namespace hspg
