#include "hspg/solvers.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hspg/regularizer.hpp"

namespace hspg {

const char* solver_name(SolverKind k) {
  switch (k) {
    case SolverKind::hspg: return "hspg";
    case SolverKind::prox_sg: return "prox_sg";
    case SolverKind::rda: return "rda";
    case SolverKind::prox_svrg: return "prox_svrg";
  }
  return "?";
}

SolverKind solver_from_name(const std::string& name) {
  if (name == "hspg") return SolverKind::hspg;
  if (name == "prox_sg") return SolverKind::prox_sg;
  if (name == "rda") return SolverKind::rda;
  if (name == "prox_svrg") return SolverKind::prox_svrg;
  throw std::invalid_argument("unknown solver: " + name);
}

void SolverConfig::validate(const Problem& problem) const {
  if (lambda < 0.0) throw std::invalid_argument("config: lambda must be nonnegative");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw std::invalid_argument("config: epsilon outside [0,1)");
  if (!(step.alpha0 > 0.0)) throw std::invalid_argument("config: alpha0 must be positive");
  if (!(step.decay_factor > 0.0))
    throw std::invalid_argument("config: decay factor must be positive");
  if (batch_size == 0 || batch_size > problem.num_instances())
    throw std::invalid_argument("config: batch size outside 1..N");
  if (max_epochs == 0) throw std::invalid_argument("config: max_epochs must be positive");
  if (stage2_batch_growth < 1.0)
    throw std::invalid_argument("config: stage2_batch_growth must be >= 1");
  const bool hspg_kind = kind == SolverKind::hspg;
  if (!hspg_kind) {
    if (epsilon != 0.0 || n_p.has_value() || stationarity_switch ||
        stage2_batch_growth != 1.0 || stage2_alpha_decay)
      throw std::invalid_argument("config: half-space stage fields set on a non-hspg solver");
  }
  if (kind == SolverKind::rda) {
    if (!(rda_gamma > 0.0)) throw std::invalid_argument("config: rda requires gamma > 0");
  } else if (rda_gamma != 0.0) {
    throw std::invalid_argument("config: gamma set on a non-rda solver");
  }
  if (kind != SolverKind::prox_svrg && svrg_inner_steps != 0)
    throw std::invalid_argument("config: inner loop length set on a non-svrg solver");
}

Parameters prox_sg_step(const SolverState& state, const Problem& problem,
                        const GroupPartition& partition, const SolverConfig& config,
                        Batch batch) {
  const Parameters g = problem.batch_gradient(state.x, batch);
  Parameters trial = state.x;
  trial.x -= state.alpha * g.x;
  if (trial.bias && g.bias) *trial.bias -= state.alpha * *g.bias;
  return prox_group_l2(trial, partition, state.alpha * config.lambda);
}

Parameters half_space_step(const SolverState& state, const Problem& problem,
                           const GroupPartition& partition, const SolverConfig& config,
                           Batch batch) {
  const Parameters grad_f = problem.batch_gradient(state.x, batch);
  const Parameters grad_om = grad_omega_on_support(state.x, partition);
  Parameters trial = state.x;
  for (std::size_t g = 0; g < partition.num_groups(); ++g) {
    auto seg = partition.slice(trial.x, g);
    if (partition.slice(state.x.x, g).isZero(0.0)) {
      seg.setZero();  // zero support stays fixed
    } else {
      seg -= state.alpha *
             (partition.slice(grad_f.x, g) + config.lambda * partition.slice(grad_om.x, g));
    }
  }
  if (trial.bias && grad_f.bias) *trial.bias -= state.alpha * *grad_f.bias;
  return half_space_project(trial, state.x, partition, config.epsilon);
}

Parameters rda_step(SolverState& state, const Problem& problem,
                    const GroupPartition& partition, const SolverConfig& config,
                    Batch batch) {
  const Parameters g = problem.batch_gradient(state.x, batch);
  if (state.rda_steps == 0) {
    state.rda_gbar = Parameters::zeros(g.x.size(), g.bias.has_value());
  }
  const double k = static_cast<double>(++state.rda_steps);
  state.rda_gbar.x = ((k - 1.0) * state.rda_gbar.x + g.x) / k;
  if (state.rda_gbar.bias && g.bias)
    state.rda_gbar.bias = ((k - 1.0) * *state.rda_gbar.bias + *g.bias) / k;

  const double scale = -std::sqrt(k) / config.rda_gamma;
  Parameters next = state.x;
  for (std::size_t gi = 0; gi < partition.num_groups(); ++gi) {
    const auto gbar = partition.slice(state.rda_gbar.x, gi);
    auto seg = partition.slice(next.x, gi);
    const double nrm = gbar.norm();
    if (nrm <= config.lambda)
      seg.setZero();
    else
      seg = scale * (1.0 - config.lambda / nrm) * gbar;
  }
  if (next.bias && state.rda_gbar.bias) next.bias = scale * *state.rda_gbar.bias;
  return next;
}

namespace {

std::vector<std::size_t> slice(const std::vector<std::size_t>& perm, std::size_t begin,
                               std::size_t size) {
  const std::size_t end = std::min(begin + size, perm.size());
  return std::vector<std::size_t>(perm.begin() + static_cast<std::ptrdiff_t>(begin),
                                  perm.begin() + static_cast<std::ptrdiff_t>(end));
}

class TraceRecorder {
 public:
  TraceRecorder(const SolverConfig& config, const Problem& problem,
                const GroupPartition& partition)
      : config_(config), problem_(problem), partition_(partition),
        start_(std::chrono::steady_clock::now()) {}

  void record(RunTrace& trace, const SolverState& state) {
    const ValueGrad vg = problem_.full_value_grad(state.x);
    EpochRecord r;
    r.epoch = state.epoch;
    r.stage = state.stage;
    r.f = vg.value;
    r.psi = vg.value + config_.lambda * omega(state.x, partition_);
    r.group_sparsity = group_sparsity_ratio(state.x, partition_);
    r.grad_map_norm = std::sqrt(
        gradient_mapping(state.x, state.alpha, vg.grad, partition_, config_.lambda)
            .squared_norm());
    r.wall_seconds =
        config_.record_wall_time
            ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count()
            : 0.0;
    trace.records.push_back(r);
  }

 private:
  const SolverConfig& config_;
  const Problem& problem_;
  const GroupPartition& partition_;
  std::chrono::steady_clock::time_point start_;
};

void echo_config(RunTrace& trace, const SolverConfig& config, const Problem& problem) {
  auto& m = trace.metadata;
  m["solver"] = solver_name(config.kind);
  m["lambda"] = std::to_string(config.lambda);
  m["epsilon"] = std::to_string(config.epsilon);
  m["alpha0"] = std::to_string(config.step.alpha0);
  m["decay_factor"] = std::to_string(config.step.decay_factor);
  m["decay_period"] = std::to_string(config.step.decay_period);
  m["batch_size"] = std::to_string(config.batch_size);
  m["max_epochs"] = std::to_string(config.max_epochs);
  m["seed"] = std::to_string(config.seed);
  m["n_p"] = config.n_p ? std::to_string(*config.n_p) : "inf";
  m["stationarity_switch"] = config.stationarity_switch ? "true" : "false";
  m["stage2_batch_growth"] = std::to_string(config.stage2_batch_growth);
  m["stage2_alpha_decay"] = config.stage2_alpha_decay ? "true" : "false";
  m["rda_gamma"] = std::to_string(config.rda_gamma);
  if (config.kind == SolverKind::rda)
    m["rda_variant"] = "sqrt_k_quadratic_prox";  // beta_k = gamma * sqrt(k)
  m["svrg_inner_steps"] = std::to_string(config.svrg_inner_steps);
  m["sampling"] = "shuffled_epoch";
  m["num_instances"] = std::to_string(problem.num_instances());
  m["dimension"] = std::to_string(problem.dimension());
}

Parameters prepare_x0(const Problem& problem, const Parameters& x0) {
  if (static_cast<std::size_t>(x0.x.size()) != problem.dimension())
    throw std::invalid_argument("run: x0 dimension mismatch");
  Parameters x = x0;
  if (problem.has_bias() && !x.bias) x.bias = 0.0;
  return x;
}

}  // namespace

RunResult run(const SolverConfig& config, const Problem& problem,
              const GroupPartition& partition, const Parameters& x0) {
  config.validate(problem);
  if (config.kind == SolverKind::prox_svrg)
    return prox_svrg_run(config, problem, partition, x0);

  const std::size_t n_instances = problem.num_instances();
  BatchSchedule schedule{n_instances, config.batch_size, config.seed};

  SolverState state;
  state.x = prepare_x0(problem, x0);
  state.alpha = config.step.alpha0;

  RunResult result;
  echo_config(result.trace, config, problem);
  TraceRecorder recorder(config, problem, partition);

  std::vector<double> psi_history;
  std::size_t current_batch = config.batch_size;
  std::size_t epochs_in_stage2 = 0;
  const double alpha_at_switch = config.step.alpha0;

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    state.epoch = epoch;
    const auto perm = schedule.permutation(epoch);
    for (std::size_t begin = 0; begin < n_instances; begin += current_batch) {
      if (config.kind == SolverKind::hspg && state.stage == Stage::initialization &&
          config.n_p && state.k >= *config.n_p)
        state.stage = Stage::group_sparsity;
      const auto batch = slice(perm, begin, current_batch);
      switch (config.kind) {
        case SolverKind::hspg:
          state.x = state.stage == Stage::group_sparsity
                        ? half_space_step(state, problem, partition, config, batch)
                        : prox_sg_step(state, problem, partition, config, batch);
          break;
        case SolverKind::prox_sg:
          state.x = prox_sg_step(state, problem, partition, config, batch);
          break;
        case SolverKind::rda:
          state.x = rda_step(state, problem, partition, config, batch);
          break;
        case SolverKind::prox_svrg:
          break;  // handled above
      }
      ++state.k;
    }

    recorder.record(result.trace, state);
    psi_history.push_back(result.trace.records.back().psi);

    // optional stationarity-based switch, tested on epoch psi values
    if (config.kind == SolverKind::hspg && state.stage == Stage::initialization &&
        !config.n_p && config.stationarity_switch &&
        psi_history.size() >= 2 * config.stationarity_window &&
        stationarity_switch_test(psi_history, config.stationarity_window,
                                 config.stationarity_rtol))
      state.stage = Stage::group_sparsity;

    // step-size schedule update at the epoch boundary
    if (config.step.decay_period > 0 && (epoch + 1) % config.step.decay_period == 0)
      state.alpha *= config.step.decay_factor;
    if (state.stage == Stage::group_sparsity) {
      ++epochs_in_stage2;
      if (config.stage2_alpha_decay)
        state.alpha = alpha_at_switch / static_cast<double>(1 + epochs_in_stage2);
      if (config.stage2_batch_growth > 1.0)
        current_batch = std::min(
            n_instances, static_cast<std::size_t>(std::ceil(
                             static_cast<double>(current_batch) * config.stage2_batch_growth)));
    }
  }

  result.final = state.x;
  return result;
}

RunResult prox_svrg_run(const SolverConfig& config, const Problem& problem,
                        const GroupPartition& partition, const Parameters& x0) {
  config.validate(problem);
  if (config.kind != SolverKind::prox_svrg)
    throw std::invalid_argument("prox_svrg_run: config.kind must be prox_svrg");
  const std::size_t n_instances = problem.num_instances();
  BatchSchedule schedule{n_instances, config.batch_size, config.seed};
  const std::size_t inner_steps =
      config.svrg_inner_steps > 0 ? config.svrg_inner_steps : schedule.num_batches();

  SolverState state;
  state.x = prepare_x0(problem, x0);
  state.alpha = config.step.alpha0;

  RunResult result;
  echo_config(result.trace, config, problem);
  TraceRecorder recorder(config, problem, partition);

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    state.epoch = epoch;
    state.svrg_anchor = state.x;
    state.svrg_mu = problem.full_value_grad(state.svrg_anchor).grad;
    const auto perm = schedule.permutation(epoch);
    for (std::size_t step = 0; step < inner_steps; ++step) {
      const std::size_t begin = (step % schedule.num_batches()) * config.batch_size;
      const auto batch = slice(perm, begin, config.batch_size);
      const Parameters g = problem.batch_gradient(state.x, batch);
      const Parameters ga = problem.batch_gradient(state.svrg_anchor, batch);
      Parameters trial = state.x;
      trial.x -= state.alpha * (g.x - ga.x + state.svrg_mu.x);
      if (trial.bias && g.bias && ga.bias && state.svrg_mu.bias)
        *trial.bias -= state.alpha * (*g.bias - *ga.bias + *state.svrg_mu.bias);
      state.x = prox_group_l2(trial, partition, state.alpha * config.lambda);
      ++state.k;
    }
    recorder.record(result.trace, state);
    if (config.step.decay_period > 0 && (epoch + 1) % config.step.decay_period == 0)
      state.alpha *= config.step.decay_factor;
  }

  result.final = state.x;
  return result;
}

double tune_epsilon(const Problem& problem, const GroupPartition& partition,
                    const SolverConfig& config, const SolverState& warm_state, double rho) {
  std::vector<std::size_t> all(problem.num_instances());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto psi_after_step = [&](double eps) {
    SolverConfig c = config;
    c.epsilon = eps;
    SolverState s = warm_state;
    s.stage = Stage::group_sparsity;
    const Parameters next = half_space_step(s, problem, partition, c, all);
    return problem.full_value(next) + config.lambda * omega(next, partition);
  };
  const double psi0 = psi_after_step(0.0);
  double accepted = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double eps = 0.01 * i;
    if (psi_after_step(eps) <= psi0 + rho * std::abs(psi0))
      accepted = eps;
    else
      break;
  }
  return accepted;
}

bool stationarity_switch_test(const std::vector<double>& psi_history,
                              std::size_t window_size, double rtol) {
  if (window_size == 0) throw std::invalid_argument("stationarity test: empty window");
  if (psi_history.size() < 2 * window_size)
    throw std::invalid_argument("stationarity test: history shorter than two windows");
  const auto mean_of = [&](std::size_t begin) {
    double s = 0.0;
    for (std::size_t i = begin; i < begin + window_size; ++i) s += psi_history[i];
    return s / static_cast<double>(window_size);
  };
  const double prev = mean_of(psi_history.size() - 2 * window_size);
  const double last = mean_of(psi_history.size() - window_size);
  return std::abs(last - prev) <= rtol * std::abs(prev);
}

}  // namespace hspg
