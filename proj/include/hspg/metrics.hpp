#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hspg/groups.hpp"
#include "hspg/parameters.hpp"

namespace hspg {

enum class Stage { initialization, group_sparsity };

const char* stage_name(Stage s);

struct EpochRecord {
  std::size_t epoch = 0;
  Stage stage = Stage::initialization;
  double psi = 0.0;
  double f = 0.0;
  double group_sparsity = 0.0;
  double grad_map_norm = 0.0;
  double wall_seconds = 0.0;
};

/// Per-epoch trace of one solver run plus the resolved configuration, so any
/// table row can be reproduced from its trace alone.
struct RunTrace {
  std::vector<EpochRecord> records;
  std::map<std::string, std::string> metadata;  // config echo, seed, dataset id, solver

  /// Stable column order: epoch,stage,psi,f,group_sparsity,grad_map_norm,wall_seconds
  void write_csv(std::ostream& os) const;
  /// JSON document with metadata and records.
  void write_json(std::ostream& os) const;
};

/// Fraction of groups whose coordinates are all exactly zero.
double group_sparsity_ratio(const Parameters& p, const GroupPartition& partition);

/// |Z_est ∩ Z_true| / |Z_est ∪ Z_true|; both empty counts as perfect
/// agreement (1.0). The two supports must live on the same group universe.
double iou_zero_groups(const GroupSupport& estimate, const GroupSupport& truth);

/// Zeroes every group with ||x_g|| strictly below the threshold.
Parameters truncate_by_magnitude(const Parameters& p, const GroupPartition& partition,
                                 double threshold);

}  // namespace hspg
