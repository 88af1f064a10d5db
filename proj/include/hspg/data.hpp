#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hspg/groups.hpp"
#include "hspg/problems.hpp"

namespace hspg {

/// Synthetic group-lasso instance with known ground truth: A and x* have iid
/// uniform[-1,1) entries, a prescribed fraction of x*'s groups is zeroed, and
/// y = A x* exactly.
struct SyntheticInstance {
  RowMatrixXd A;
  Eigen::VectorXd y;
  Parameters x_star;
  std::vector<std::size_t> true_zero_groups;  // sorted
  GroupPartition partition;
};

/// All randomness derives from `seed`; equal seeds give bit-identical
/// instances. Exactly round(sparsity_ratio * num_groups) groups are zeroed,
/// chosen uniformly without replacement.
SyntheticInstance gen_synthetic(std::size_t num_instances, std::size_t dim,
                                std::size_t num_groups, double sparsity_ratio,
                                std::uint64_t seed);

/// Row-major text dump for cross-implementation checks.
void dump_synthetic(const SyntheticInstance& inst, std::ostream& os);

struct LibsvmData {
  SparseRowMatrix features;
  Eigen::VectorXd labels;  // mapped to {-1,+1}: label > 0 -> +1, else -1
};

/// Parses `<label> <idx>:<val> ...` lines with 1-based strictly increasing
/// indices. Blank lines are tolerated. The feature dimension is the maximum
/// index observed, or `min_dimension` if that is larger. Errors report the
/// offending line number.
LibsvmData parse_libsvm(std::istream& is, std::size_t min_dimension = 0);

LogisticProblem load_libsvm_problem(const std::string& path, std::size_t min_dimension = 0,
                                    bool with_bias = true);

/// Inverse of parse_libsvm up to label canonicalization; values round-trip
/// exactly (printed with max_digits10).
void serialize_libsvm(const LogisticProblem& problem, std::ostream& os);

/// Shuffled-epoch sampling: each epoch is a fresh permutation of 0..N-1
/// derived from (seed, epoch); batches are consecutive slices (last one may
/// be short).
struct BatchSchedule {
  std::size_t num_instances = 0;
  std::size_t batch_size = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> permutation(std::size_t epoch) const;
  std::size_t num_batches() const {
    return (num_instances + batch_size - 1) / batch_size;
  }
};

/// Batch `step` of the given epoch.
std::vector<std::size_t> next_batch(const BatchSchedule& schedule, std::size_t epoch,
                                    std::size_t step);

}  // namespace hspg
