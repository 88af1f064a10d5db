#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hspg/data.hpp"
#include "hspg/groups.hpp"
#include "hspg/metrics.hpp"
#include "hspg/problems.hpp"

namespace hspg {

enum class SolverKind { hspg, prox_sg, rda, prox_svrg };

const char* solver_name(SolverKind k);
SolverKind solver_from_name(const std::string& name);

/// Constant by default; set decay_period > 0 for piecewise decay.
struct StepSchedule {
  double alpha0 = 0.1;
  double decay_factor = 1.0;
  std::size_t decay_period = 0;  // epochs between decays, 0 = never
};

struct SolverConfig {
  SolverKind kind = SolverKind::hspg;
  double lambda = 0.0;
  double epsilon = 0.0;                 // half-space aggressiveness (hspg)
  std::optional<std::size_t> n_p;       // switch step count; nullopt = never switch
  bool stationarity_switch = false;     // alternative to fixed n_p
  std::size_t stationarity_window = 10;
  double stationarity_rtol = 1e-3;
  StepSchedule step;
  std::size_t batch_size = 0;
  std::size_t max_epochs = 0;
  std::uint64_t seed = 0;
  double rda_gamma = 0.0;               // rda step-size parameter
  std::size_t svrg_inner_steps = 0;     // 0 = one epoch per anchor
  double stage2_batch_growth = 1.0;     // >1 opts into the increasing-batch schedule
  bool stage2_alpha_decay = false;      // opts into 1/t stage-2 decay
  bool record_wall_time = true;

  /// Rejects invalid values and fields that do not belong to `kind`.
  void validate(const Problem& problem) const;
};

struct SolverState {
  Parameters x;
  std::size_t k = 0;  // global step counter
  std::size_t epoch = 0;
  Stage stage = Stage::initialization;
  double alpha = 0.0;
  // rda accumulator
  Parameters rda_gbar;
  std::size_t rda_steps = 0;
  // prox-svrg anchor
  Parameters svrg_anchor;
  Parameters svrg_mu;
};

/// One stochastic proximal gradient update (the initialization stage step and
/// the Prox-SG baseline step). The bias takes a plain gradient step.
Parameters prox_sg_step(const SolverState& state, const Problem& problem,
                        const GroupPartition& partition, const SolverConfig& config,
                        Batch batch);

/// One group-sparsity stage update: restricted gradient of the full objective
/// on the nonzero support, SGD trial point with the zero support pinned at
/// zero, then the half-space projection. Zero groups never revive.
Parameters half_space_step(const SolverState& state, const Problem& problem,
                           const GroupPartition& partition, const SolverConfig& config,
                           Batch batch);

/// Dual-averaging update: group soft-threshold of the running gradient
/// average with the sqrt(k)-scaled proximal term. Advances the accumulator.
Parameters rda_step(SolverState& state, const Problem& problem,
                    const GroupPartition& partition, const SolverConfig& config,
                    Batch batch);

struct RunResult {
  Parameters final;
  RunTrace trace;
};

/// Runs the configured solver for max_epochs and records the per-epoch trace
/// (full-batch psi and f, group sparsity, gradient-mapping norm, stage, wall
/// time). Bit-reproducible for equal (config, seed); single-threaded.
RunResult run(const SolverConfig& config, const Problem& problem,
              const GroupPartition& partition, const Parameters& x0);

/// Variance-reduced baseline: per outer iteration, snapshot the anchor and
/// its full gradient, then run the inner loop of proximal steps.
RunResult prox_svrg_run(const SolverConfig& config, const Problem& problem,
                        const GroupPartition& partition, const Parameters& x0);

/// Centesimal search 0.00, 0.01, ..., 0.20: accepts the largest epsilon whose
/// first half-space step (full batch, from the warm state) does not increase
/// psi by more than rho relative to the epsilon = 0 value.
double tune_epsilon(const Problem& problem, const GroupPartition& partition,
                    const SolverConfig& config, const SolverState& warm_state,
                    double rho = 0.01);

/// True when the last `window_size` psi values average to within rtol
/// (relative) of the previous window's average.
bool stationarity_switch_test(const std::vector<double>& psi_history,
                              std::size_t window_size, double rtol);

}  // namespace hspg
