#include "hspg/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "hspg/regularizer.hpp"

namespace hspg {

const char* stage_name(Stage s) {
  return s == Stage::initialization ? "initialization" : "group_sparsity";
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void RunTrace::write_csv(std::ostream& os) const {
  os << "epoch,stage,psi,f,group_sparsity,grad_map_norm,wall_seconds\n";
  for (const auto& r : records) {
    os << r.epoch << ',' << stage_name(r.stage) << ',' << fmt(r.psi) << ',' << fmt(r.f)
       << ',' << fmt(r.group_sparsity) << ',' << fmt(r.grad_map_norm) << ','
       << fmt(r.wall_seconds) << '\n';
  }
}

void RunTrace::write_json(std::ostream& os) const {
  nlohmann::json j;
  j["metadata"] = metadata;
  auto& recs = j["records"] = nlohmann::json::array();
  for (const auto& r : records) {
    recs.push_back({{"epoch", r.epoch},
                    {"stage", stage_name(r.stage)},
                    {"psi", r.psi},
                    {"f", r.f},
                    {"group_sparsity", r.group_sparsity},
                    {"grad_map_norm", r.grad_map_norm},
                    {"wall_seconds", r.wall_seconds}});
  }
  os << j.dump(2) << '\n';
}

double group_sparsity_ratio(const Parameters& p, const GroupPartition& partition) {
  const GroupSupport s = support_of(p.x, partition);
  return static_cast<double>(s.zero_groups.size()) /
         static_cast<double>(partition.num_groups());
}

double iou_zero_groups(const GroupSupport& estimate, const GroupSupport& truth) {
  if (estimate.num_groups != truth.num_groups)
    throw std::invalid_argument("iou_zero_groups: mismatched group universes");
  std::vector<std::size_t> inter, uni;
  std::set_intersection(estimate.zero_groups.begin(), estimate.zero_groups.end(),
                        truth.zero_groups.begin(), truth.zero_groups.end(),
                        std::back_inserter(inter));
  std::set_union(estimate.zero_groups.begin(), estimate.zero_groups.end(),
                 truth.zero_groups.begin(), truth.zero_groups.end(), std::back_inserter(uni));
  if (uni.empty()) return 1.0;  // both supports empty: perfect agreement
  return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

Parameters truncate_by_magnitude(const Parameters& p, const GroupPartition& partition,
                                 double threshold) {
  if (threshold < 0.0)
    throw std::invalid_argument("truncate_by_magnitude: negative threshold");
  if (static_cast<std::size_t>(p.x.size()) != partition.dim())
    throw std::invalid_argument("truncate_by_magnitude: dimension mismatch");
  Parameters out = p;
  for (std::size_t g = 0; g < partition.num_groups(); ++g) {
    auto seg = partition.slice(out.x, g);
    if (seg.norm() < threshold) seg.setZero();
  }
  return out;
}

}  // namespace hspg
