// Experiment runner: synthetic group-recovery benchmarks, LIBSVM logistic
// regression comparisons, config sweeps, and the property-suite verifier.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hspg/data.hpp"
#include "hspg/metrics.hpp"
#include "hspg/regularizer.hpp"
#include "hspg/selfcheck.hpp"
#include "hspg/solvers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerify = 3;

struct SolverSpec {
  hspg::SolverKind kind;
  double epsilon = 0.0;
  std::string tag;  // e.g. hspg@0.05
};

// "hspg", "hspg@0.05", "prox_sg", ...
SolverSpec parse_solver_spec(const std::string& text, double default_epsilon) {
  SolverSpec spec;
  const auto at = text.find('@');
  const std::string name = text.substr(0, at);
  spec.kind = hspg::solver_from_name(name);
  spec.epsilon = spec.kind == hspg::SolverKind::hspg ? default_epsilon : 0.0;
  if (at != std::string::npos) {
    if (spec.kind != hspg::SolverKind::hspg)
      throw CLI::ValidationError("--solver", "only hspg takes an @epsilon suffix");
    spec.epsilon = std::stod(text.substr(at + 1));
  }
  std::ostringstream tag;
  tag << hspg::solver_name(spec.kind);
  if (spec.kind == hspg::SolverKind::hspg) tag << "@" << spec.epsilon;
  spec.tag = tag.str();
  return spec;
}

void write_trace(const hspg::RunTrace& trace, const fs::path& dir, const std::string& tag) {
  std::ofstream csv(dir / (tag + "_trace.csv"));
  trace.write_csv(csv);
  std::ofstream js(dir / (tag + "_trace.json"));
  trace.write_json(js);
}

void write_manifest(const json& manifest, const fs::path& dir) {
  std::ofstream os(dir / "manifest.json");
  os << manifest.dump(2) << '\n';
}

json config_to_json(const hspg::SolverConfig& c) {
  return json{{"solver", hspg::solver_name(c.kind)},
              {"lambda", c.lambda},
              {"epsilon", c.epsilon},
              {"n_p", c.n_p ? json(*c.n_p) : json("inf")},
              {"alpha0", c.step.alpha0},
              {"decay_factor", c.step.decay_factor},
              {"decay_period", c.step.decay_period},
              {"batch_size", c.batch_size},
              {"max_epochs", c.max_epochs},
              {"seed", c.seed},
              {"rda_gamma", c.rda_gamma},
              {"svrg_inner_steps", c.svrg_inner_steps},
              {"stage2_batch_growth", c.stage2_batch_growth},
              {"stage2_alpha_decay", c.stage2_alpha_decay},
              {"sampling", "shuffled_epoch"}};
}

struct SynthOptions {
  std::size_t N = 10000, n = 1000, groups = 10;
  double ratio = 0.5;
  std::vector<std::string> solvers;
  double lambda = -1.0;  // <0: 100/N
  double alpha = 0.1;
  std::size_t batch = 64;
  std::size_t epochs = 60;
  std::size_t np_epochs = 30;
  double epsilon = 0.0;
  double stage2_growth = 4.0;  // 1 restores the constant-batch stage 2
  double rda_gamma = 1.0;
  double decay_factor = 1.0;
  std::size_t decay_period = 0;
  std::uint64_t seed = 3;
  std::uint64_t data_seed = 7;
  std::string out = "runs/synth";
  bool no_walltime = false;
  bool dump_instance = false;
  bool quiet = false;  // sweep cells print from the coordinating thread
};

int cmd_synth_recovery(const SynthOptions& opt) {
  const fs::path dir(opt.out);
  fs::create_directories(dir);
  hspg::SyntheticInstance inst =
      hspg::gen_synthetic(opt.N, opt.n, opt.groups, opt.ratio, opt.data_seed);
  const double lambda = opt.lambda < 0.0 ? 100.0 / static_cast<double>(opt.N) : opt.lambda;
  if (opt.dump_instance) {
    std::ofstream os(dir / "instance.txt");
    hspg::dump_synthetic(inst, os);
  }
  const hspg::LeastSquaresProblem problem(std::move(inst.A), inst.y);

  hspg::GroupSupport truth;
  truth.num_groups = opt.groups;
  truth.zero_groups = inst.true_zero_groups;
  for (std::size_t g = 0; g < opt.groups; ++g)
    if (!std::binary_search(truth.zero_groups.begin(), truth.zero_groups.end(), g))
      truth.nonzero_groups.push_back(g);

  json manifest;
  manifest["experiment"] = "synth-recovery";
  manifest["N"] = opt.N;
  manifest["n"] = opt.n;
  manifest["groups"] = opt.groups;
  manifest["ratio"] = opt.ratio;
  manifest["data_seed"] = opt.data_seed;
  manifest["runs"] = json::array();

  std::ofstream summary(dir / "summary.csv");
  summary << "N,n,ratio,solver,final_psi,group_sparsity,iou\n";
  if (!opt.quiet) {
    std::cout << "N=" << opt.N << " n=" << opt.n << " groups=" << opt.groups
              << " ratio=" << opt.ratio << " lambda=" << lambda << "\n";
    std::cout << std::left << std::setw(14) << "solver" << std::setw(12) << "final_psi"
              << std::setw(12) << "sparsity" << "iou\n";
  }

  auto solver_list = opt.solvers;
  if (solver_list.empty()) solver_list = {"hspg"};
  for (const auto& text : solver_list) {
    const SolverSpec spec = parse_solver_spec(text, opt.epsilon);
    hspg::SolverConfig config;
    config.kind = spec.kind;
    config.lambda = lambda;
    config.step.alpha0 = opt.alpha;
    config.step.decay_factor = opt.decay_factor;
    config.step.decay_period = opt.decay_period;
    config.batch_size = std::min(opt.batch, opt.N);
    config.max_epochs = opt.epochs;
    config.seed = opt.seed;
    config.record_wall_time = !opt.no_walltime;
    if (spec.kind == hspg::SolverKind::hspg) {
      config.epsilon = spec.epsilon;
      const std::size_t steps_per_epoch =
          (opt.N + config.batch_size - 1) / config.batch_size;
      config.n_p = opt.np_epochs * steps_per_epoch;
      config.stage2_batch_growth = opt.stage2_growth;
    } else if (spec.kind == hspg::SolverKind::rda) {
      config.rda_gamma = opt.rda_gamma;
    }
    hspg::RunResult res =
        hspg::run(config, problem, inst.partition,
                  hspg::Parameters::zeros(static_cast<Eigen::Index>(opt.n)));
    std::ostringstream dataset_id;
    dataset_id << "synthetic:N=" << opt.N << ",n=" << opt.n << ",groups=" << opt.groups
               << ",ratio=" << opt.ratio << ",data_seed=" << opt.data_seed;
    res.trace.metadata["dataset"] = dataset_id.str();
    write_trace(res.trace, dir, spec.tag);
    const double psi = res.trace.records.back().psi;
    const double sparsity = res.trace.records.back().group_sparsity;
    const double iou =
        hspg::iou_zero_groups(hspg::support_of(res.final.x, inst.partition), truth);
    summary << opt.N << ',' << opt.n << ',' << opt.ratio << ',' << spec.tag << ',' << psi
            << ',' << sparsity << ',' << iou << '\n';
    if (!opt.quiet)
      std::cout << std::left << std::setw(14) << spec.tag << std::setw(12) << psi
                << std::setw(12) << sparsity << iou << "\n";
    json run_entry = config_to_json(config);
    run_entry["tag"] = spec.tag;
    run_entry["iou"] = iou;
    manifest["runs"].push_back(run_entry);
  }
  write_manifest(manifest, dir);
  return kExitOk;
}

struct LogregOptions {
  std::string data;
  std::vector<std::string> solvers;
  double lambda = -1.0;   // <0: 100/N
  double alpha = -1.0;    // <0: 1/L
  long long batch = -1;   // <0: min(256, ceil(0.01 N))
  std::size_t epochs = 60;
  std::size_t np_epochs = 30;
  double epsilon = 0.05;
  double rda_gamma = 1.0;
  double decay_factor = 1.0;
  std::size_t decay_period = 0;
  std::uint64_t seed = 3;
  std::string out = "runs/logreg";
  bool no_walltime = false;
  bool no_bias = false;
  bool quiet = false;
};

int cmd_logreg(const LogregOptions& opt) {
  const fs::path dir(opt.out);
  fs::create_directories(dir);
  const hspg::LogisticProblem problem = hspg::load_libsvm_problem(opt.data, 0, !opt.no_bias);
  const std::size_t N = problem.num_instances();
  const hspg::GroupPartition partition = hspg::make_equal_partition(problem.dimension(), 10);
  const double lambda = opt.lambda < 0.0 ? 100.0 / static_cast<double>(N) : opt.lambda;
  const double lipschitz = problem.lipschitz_estimate();
  // degenerate all-zero data has L = 0; fall back to a fixed constant
  const double alpha = opt.alpha > 0.0 ? opt.alpha : (lipschitz > 0.0 ? 1.0 / lipschitz : 0.1);
  const std::size_t batch =
      opt.batch > 0 ? static_cast<std::size_t>(opt.batch)
                    : std::min<std::size_t>(
                          256, static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(N))));

  json manifest;
  manifest["experiment"] = "logreg";
  manifest["data"] = opt.data;
  manifest["N"] = N;
  manifest["n"] = problem.dimension();
  manifest["lipschitz"] = lipschitz;
  manifest["runs"] = json::array();

  std::ofstream summary(dir / "summary.csv");
  summary << "solver,final_psi,final_f,group_sparsity\n";
  if (!opt.quiet) {
    std::cout << "dataset " << opt.data << ": N=" << N << " n=" << problem.dimension()
              << " L=" << lipschitz << " lambda=" << lambda << " alpha=" << alpha
              << " batch=" << batch << "\n";
    std::cout << std::left << std::setw(14) << "solver" << std::setw(12) << "final_psi"
              << std::setw(12) << "final_f" << "sparsity\n";
  }

  auto solver_list = opt.solvers;
  if (solver_list.empty()) solver_list = {"prox_sg", "prox_svrg", "hspg@0", "hspg@0.05"};
  for (const auto& text : solver_list) {
    const SolverSpec spec = parse_solver_spec(text, opt.epsilon);
    hspg::SolverConfig config;
    config.kind = spec.kind;
    config.lambda = lambda;
    config.step.alpha0 = alpha;
    config.step.decay_factor = opt.decay_factor;
    config.step.decay_period = opt.decay_period;
    config.batch_size = std::min(batch, N);
    config.max_epochs = opt.epochs;
    config.seed = opt.seed;
    config.record_wall_time = !opt.no_walltime;
    if (spec.kind == hspg::SolverKind::hspg) {
      config.epsilon = spec.epsilon;
      const std::size_t steps_per_epoch = (N + config.batch_size - 1) / config.batch_size;
      config.n_p = opt.np_epochs * steps_per_epoch;
    } else if (spec.kind == hspg::SolverKind::rda) {
      config.rda_gamma = opt.rda_gamma;
    }
    hspg::RunResult res =
        hspg::run(config, problem, partition,
                  hspg::Parameters::zeros(static_cast<Eigen::Index>(problem.dimension())));
    res.trace.metadata["dataset"] = opt.data;
    write_trace(res.trace, dir, spec.tag);
    const auto& last = res.trace.records.back();
    summary << spec.tag << ',' << last.psi << ',' << last.f << ',' << last.group_sparsity
            << '\n';
    if (!opt.quiet)
      std::cout << std::left << std::setw(14) << spec.tag << std::setw(12) << last.psi
                << std::setw(12) << last.f << last.group_sparsity << "\n";
    json run_entry = config_to_json(config);
    run_entry["tag"] = spec.tag;
    manifest["runs"].push_back(run_entry);
  }
  write_manifest(manifest, dir);
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, std::size_t jobs) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open sweep config: " + config_path);
  json cfg = json::parse(in);
  const std::string out_root = cfg.value("out", "runs/sweep");
  const auto& cells = cfg.at("cells");

  const auto run_cell = [&](std::size_t idx) -> int {
    const json& cell = cells.at(idx);
    const std::string type = cell.at("type");
    const std::string out = out_root + "/cell_" + std::to_string(idx);
    if (type == "synth") {
      SynthOptions o;
      o.N = cell.value("N", o.N);
      o.n = cell.value("n", o.n);
      o.groups = cell.value("groups", o.groups);
      o.ratio = cell.value("ratio", o.ratio);
      o.solvers = cell.value("solvers", std::vector<std::string>{"hspg"});
      o.lambda = cell.value("lambda", o.lambda);
      o.alpha = cell.value("alpha", o.alpha);
      o.batch = cell.value("batch", o.batch);
      o.epochs = cell.value("epochs", o.epochs);
      o.np_epochs = cell.value("np_epochs", o.np_epochs);
      o.epsilon = cell.value("epsilon", o.epsilon);
      o.stage2_growth = cell.value("stage2_batch_growth", o.stage2_growth);
      o.decay_factor = cell.value("alpha_decay_factor", o.decay_factor);
      o.decay_period = cell.value("alpha_decay_period", o.decay_period);
      o.seed = cell.value("seed", o.seed);
      o.data_seed = cell.value("data_seed", o.data_seed);
      o.out = out;
      o.quiet = true;
      return cmd_synth_recovery(o);
    }
    if (type == "logreg") {
      LogregOptions o;
      o.data = cell.at("data");
      o.solvers = cell.value("solvers", std::vector<std::string>{});
      o.lambda = cell.value("lambda", o.lambda);
      o.alpha = cell.value("alpha", o.alpha);
      o.batch = cell.value("batch", o.batch);
      o.epochs = cell.value("epochs", o.epochs);
      o.np_epochs = cell.value("np_epochs", o.np_epochs);
      o.epsilon = cell.value("epsilon", o.epsilon);
      o.seed = cell.value("seed", o.seed);
      o.out = out;
      o.quiet = true;
      return cmd_logreg(o);
    }
    throw std::runtime_error("sweep cell " + std::to_string(idx) + ": unknown type " + type);
  };

  // independent cells in parallel worker slots; each cell single-threaded
  std::size_t next = 0;
  int worst = kExitOk;
  while (next < cells.size()) {
    std::vector<std::pair<std::size_t, std::future<int>>> slot;
    for (std::size_t j = 0; j < std::max<std::size_t>(jobs, 1) && next < cells.size(); ++j) {
      slot.emplace_back(next, std::async(std::launch::async, run_cell, next));
      ++next;
    }
    for (auto& [idx, fut] : slot) {
      const int rc = fut.get();
      std::cout << "cell " << idx << ": " << (rc == 0 ? "ok" : "failed") << " ("
                << out_root << "/cell_" << idx << ")\n";
      worst = std::max(worst, rc);
    }
  }
  return worst;
}

int cmd_verify(const std::string& suite, const std::string& data, std::uint64_t seed) {
  std::vector<hspg::SuiteResult> results;
  if (suite.empty()) {
    results = hspg::run_all_suites(data, seed);
  } else {
    if (suite == "prox_oracle") results.push_back(hspg::prox_oracle_suite(1000, seed));
    else if (suite == "prox_nonexpansive")
      results.push_back(hspg::prox_nonexpansive_suite(1000, seed));
    else if (suite == "gradient_ls") results.push_back(hspg::gradient_check_ls_suite(100, seed));
    else if (suite == "gradient_logistic")
      results.push_back(hspg::gradient_check_logistic_suite(100, seed));
    else if (suite == "gradient_composite")
      results.push_back(hspg::composite_gradient_suite(100, seed));
    else if (suite == "superset") results.push_back(hspg::superset_suite(10000, seed));
    else if (suite == "identification") results.push_back(hspg::identification_suite(100, seed));
    else if (suite == "sufficient_decrease") {
      if (!data.empty()) {
        const hspg::LogisticProblem p = hspg::load_libsvm_problem(data);
        const hspg::GroupPartition part = hspg::make_equal_partition(p.dimension(), 10);
        results.push_back(hspg::sufficient_decrease_suite(
            p, part, 100.0 / static_cast<double>(p.num_instances()), 0.05, 100, 3, seed));
      } else {
        const hspg::LogisticProblem p = hspg::make_test_logistic(600, 40, seed);
        const hspg::GroupPartition part = hspg::make_equal_partition(p.dimension(), 8);
        results.push_back(hspg::sufficient_decrease_suite(p, part, 10.0 / 600.0, 0.05, 100, 3, seed));
      }
    } else {
      throw CLI::ValidationError("--suite", "unknown suite: " + suite);
    }
  }
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-sparsity optimization benchmarks (HSPG and baselines)"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* sc_synth = app.add_subcommand("synth-recovery", "synthetic group-lasso recovery");
  sc_synth->add_option("--N", synth.N, "instances")->check(CLI::PositiveNumber);
  sc_synth->add_option("--n", synth.n, "dimension")->check(CLI::PositiveNumber);
  sc_synth->add_option("--groups", synth.groups, "number of groups")->check(CLI::PositiveNumber);
  sc_synth->add_option("--ratio", synth.ratio, "ground-truth zero-group ratio")
      ->check(CLI::Range(0.0, 1.0));
  sc_synth->add_option("--solver", synth.solvers, "solver (repeatable; hspg takes @epsilon)");
  sc_synth->add_option("--lambda", synth.lambda, "penalty weight (default 100/N)");
  sc_synth->add_option("--alpha", synth.alpha, "step size")->check(CLI::PositiveNumber);
  sc_synth->add_option("--batch", synth.batch, "mini-batch size")->check(CLI::PositiveNumber);
  sc_synth->add_option("--epochs", synth.epochs, "total epochs")->check(CLI::PositiveNumber);
  sc_synth->add_option("--np-epochs", synth.np_epochs, "epochs before the half-space stage");
  sc_synth->add_option("--epsilon", synth.epsilon, "half-space epsilon for bare 'hspg'")
      ->check(CLI::Range(0.0, 0.9999));
  sc_synth->add_option("--stage2-batch-growth", synth.stage2_growth,
                       "per-epoch batch growth factor after the switch (1 = constant)");
  sc_synth->add_option("--alpha-decay-factor", synth.decay_factor,
                       "multiply the step size by this every decay period");
  sc_synth->add_option("--alpha-decay-period", synth.decay_period,
                       "epochs between step-size decays (0 = constant)");
  sc_synth->add_option("--rda-gamma", synth.rda_gamma, "rda step-size parameter");
  sc_synth->add_option("--seed", synth.seed, "run seed");
  sc_synth->add_option("--data-seed", synth.data_seed, "instance generation seed");
  sc_synth->add_option("--out", synth.out, "output directory");
  sc_synth->add_flag("--no-walltime", synth.no_walltime, "record 0 wall seconds");
  sc_synth->add_flag("--dump-instance", synth.dump_instance, "write the instance matrix dump");

  LogregOptions logreg;
  auto* sc_logreg = app.add_subcommand("logreg", "l1/l2-regularized logistic regression");
  sc_logreg->add_option("--data", logreg.data, "LIBSVM-format dataset")->required();
  sc_logreg->add_option("--solver", logreg.solvers,
                        "solver (repeatable; default: prox_sg prox_svrg hspg@0 hspg@0.05)");
  sc_logreg->add_option("--lambda", logreg.lambda, "penalty weight (default 100/N)");
  sc_logreg->add_option("--alpha", logreg.alpha, "step size (default 1/L)");
  sc_logreg->add_option("--batch", logreg.batch, "mini-batch size (default min(256, 1% of N))");
  sc_logreg->add_option("--epochs", logreg.epochs, "total epochs")->check(CLI::PositiveNumber);
  sc_logreg->add_option("--np-epochs", logreg.np_epochs, "epochs before the half-space stage");
  sc_logreg->add_option("--epsilon", logreg.epsilon, "half-space epsilon for bare 'hspg'")
      ->check(CLI::Range(0.0, 0.9999));
  sc_logreg->add_option("--alpha-decay-factor", logreg.decay_factor,
                        "multiply the step size by this every decay period");
  sc_logreg->add_option("--alpha-decay-period", logreg.decay_period,
                        "epochs between step-size decays (0 = constant)");
  sc_logreg->add_option("--rda-gamma", logreg.rda_gamma, "rda step-size parameter");
  sc_logreg->add_option("--seed", logreg.seed, "run seed");
  sc_logreg->add_option("--out", logreg.out, "output directory");
  sc_logreg->add_flag("--no-walltime", logreg.no_walltime, "record 0 wall seconds");
  sc_logreg->add_flag("--no-bias", logreg.no_bias, "drop the unregularized intercept");

  std::string sweep_config;
  std::size_t sweep_jobs = 1;
  auto* sc_sweep = app.add_subcommand("sweep", "run a grid of cells from a JSON config");
  sc_sweep->add_option("--config", sweep_config, "sweep config file")->required();
  sc_sweep->add_option("--jobs", sweep_jobs, "parallel worker slots")->check(CLI::PositiveNumber);

  std::string verify_suite, verify_data;
  std::uint64_t verify_seed = 20240901;
  auto* sc_verify = app.add_subcommand("verify", "run the property suites");
  sc_verify->add_option("--suite", verify_suite,
                        "one of: prox_oracle prox_nonexpansive gradient_ls gradient_logistic "
                        "gradient_composite superset sufficient_decrease identification (default: all)");
  sc_verify->add_option("--data", verify_data, "LIBSVM dataset for the sufficient-decrease suite");
  sc_verify->add_option("--seed", verify_seed, "suite seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (sc_synth->parsed()) return cmd_synth_recovery(synth);
    if (sc_logreg->parsed()) return cmd_logreg(logreg);
    if (sc_sweep->parsed()) return cmd_sweep(sweep_config, sweep_jobs);
    if (sc_verify->parsed()) return cmd_verify(verify_suite, verify_data, verify_seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
