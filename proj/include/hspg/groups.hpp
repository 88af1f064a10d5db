#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace hspg {

struct GroupRange {
  std::size_t start = 0;
  std::size_t length = 0;
};

/// Fixed disjoint partition of coordinates 0..n-1 into contiguous groups.
/// Immutable after construction; safe to share across threads.
class GroupPartition {
 public:
  GroupPartition(std::vector<GroupRange> groups, std::size_t n);

  std::size_t dim() const { return n_; }
  std::size_t num_groups() const { return groups_.size(); }
  const GroupRange& group(std::size_t g) const { return groups_[g]; }
  const std::vector<GroupRange>& groups() const { return groups_; }

  /// Group slice of a vector, allocation-free.
  template <typename Vec>
  auto slice(Vec&& v, std::size_t g) const {
    const auto& r = groups_[g];
    return v.segment(static_cast<Eigen::Index>(r.start),
                     static_cast<Eigen::Index>(r.length));
  }

 private:
  std::vector<GroupRange> groups_;
  std::size_t n_;
};

/// Zero / nonzero group index sets of an iterate (both sorted ascending).
struct GroupSupport {
  std::vector<std::size_t> zero_groups;
  std::vector<std::size_t> nonzero_groups;
  std::size_t num_groups = 0;
};

/// Contiguous groups with sizes differing by at most one; the first
/// n mod num_groups groups take the extra coordinate.
GroupPartition make_equal_partition(std::size_t n, std::size_t num_groups);

/// A group is zero iff every coordinate in it is exactly 0.0. No tolerance:
/// the prox and half-space operators write literal zeros.
GroupSupport support_of(const Eigen::VectorXd& x, const GroupPartition& partition);

}  // namespace hspg
