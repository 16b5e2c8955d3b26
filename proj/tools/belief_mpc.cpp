// belief-mpc: command-line driver for the closed-loop experiments.
//
//   belief-mpc h-sweep --system random --trials 10 --out results/
//   belief-mpc validate

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bmpc/bmpc.hpp"

namespace {

struct Flags {
  std::optional<std::string> system;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> horizon;
  std::optional<int> steps;
  std::optional<int> parallel;
  std::optional<std::string> controller;
  std::optional<int> lbfgs_iters;
  std::optional<double> lbfgs_step;
  std::optional<int> lbfgs_memory;
  std::vector<int> horizons;
  std::vector<int> iterations;
  std::string config;
  std::string out = "results";
};

bmpc::ExperimentConfig resolve(const Flags& f) {
  bmpc::ExperimentConfig cfg;
  if (!f.config.empty()) bmpc::load_config_file(cfg, f.config);
  if (f.system) {
    cfg.systems = *f.system == "both" ? bmpc::kBothSystems
                                      : std::vector<bmpc::SystemKind>{bmpc::parse_system(*f.system)};
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.trials) cfg.trials = *f.trials;
  if (f.horizon) cfg.horizon = *f.horizon;
  if (f.steps) cfg.steps = *f.steps;
  if (f.parallel) cfg.parallel = *f.parallel;
  if (f.controller) cfg.controllers = {bmpc::parse_controller(*f.controller)};
  if (f.lbfgs_iters) cfg.lbfgs.max_iters = *f.lbfgs_iters;
  if (f.lbfgs_step) cfg.lbfgs.step_size = *f.lbfgs_step;
  if (f.lbfgs_memory) cfg.lbfgs.memory = *f.lbfgs_memory;
  if (!f.horizons.empty()) cfg.horizon_grid = f.horizons;
  if (!f.iterations.empty()) cfg.iteration_grid = f.iterations;
  cfg.validate();
  return cfg;
}

void print_summary(const bmpc::ExperimentResult& res) {
  for (const auto& r : res.rows) {
    std::string axes;
    for (std::size_t i = 0; i < r.axes.size(); ++i) {
      axes += fmt::format(" {}={}", res.axis_names[i], r.axes[i]);
    }
    fmt::print("{:<18} {:<20}{:<40} mean={:.6g} ci95={:.3g}\n", r.system, r.controller, axes,
               r.stats.mean, r.stats.ci95);
  }
}

int run_validate(const bmpc::ExperimentConfig& cfg) {
  bool ok = true;
  for (const auto& c : bmpc::run_self_checks(cfg)) {
    fmt::print("[{}] {} ({:.3g} <= {:.3g})\n", c.passed ? "PASS" : "FAIL", c.name, c.value,
               c.threshold);
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Belief-space MPC experiments for linear systems with bilinear observations",
               "belief-mpc"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--system", f.system, "random | double-integrator | both")
      ->check(CLI::IsMember({"random", "double-integrator", "double_integrator", "both"}));
  app.add_option("--seed", f.seed, "master seed");
  app.add_option("--trials", f.trials, "matched-noise trials per cell (default 10)");
  app.add_option("--horizon", f.horizon, "planning horizon (default 10 random, 15 double integrator)");
  app.add_option("--steps", f.steps, "trajectory length T (default 300)");
  app.add_option("--out", f.out, "output directory")->capture_default_str();
  app.add_option("--config", f.config, "YAML key-value configuration file");
  app.add_option("--parallel", f.parallel, "worker threads");
  app.add_option("--controller", f.controller, "restrict to one controller")
      ->check(CLI::IsMember({"sep", "sep-mpc", "sep-mpc-lbfgs", "b-mpc"}));
  app.add_option("--lbfgs-iters", f.lbfgs_iters, "L-BFGS iterations per planning step (default 20)");
  app.add_option("--lbfgs-step", f.lbfgs_step, "initial line-search step (default 0.8)");
  app.add_option("--lbfgs-memory", f.lbfgs_memory, "L-BFGS memory (default 10)");
  app.add_option("--horizons", f.horizons, "horizon grid override")->delimiter(',');
  app.add_option("--iterations", f.iterations, "iteration grid override (init-study)")->delimiter(',');

  using Runner = std::function<bmpc::ExperimentResult(const bmpc::ExperimentConfig&)>;
  const std::map<std::string, std::pair<std::string, Runner>> experiments = {
      {"h-sweep", {"total cost versus planning horizon", bmpc::run_h_sweep}},
      {"decompose", {"state/input/total cost decomposition", bmpc::run_cost_decomposition}},
      {"kf-diag", {"estimation error and covariance trace over time", bmpc::run_kf_diagnostics}},
      {"counterfactual", {"Sep-MPC vs B-MPC actions along one trajectory", bmpc::run_counterfactual}},
      {"synthetic-gap",
       {"action gap versus covariance scale",
        [](const bmpc::ExperimentConfig& c) { return bmpc::run_synthetic_gap(c); }}},
      {"heatmap", {"B-MPC gain over Sep across r_scale and c0", bmpc::run_heatmap}},
      {"rho-sweep", {"total cost versus spectral radius", bmpc::run_rho_sweep}},
      {"runtime", {"wall-clock time per trajectory", bmpc::run_runtime_study}},
      {"init-study", {"B-MPC cost versus L-BFGS budget for two initializations", bmpc::run_init_study}},
  };
  for (const auto& [name, entry] : experiments) app.add_subcommand(name, entry.first);
  app.add_subcommand("validate", "numerical self-checks of the configured systems");

  CLI11_PARSE(app, argc, argv);

  try {
    const bmpc::ExperimentConfig cfg = resolve(f);
    CLI::App* sub = app.get_subcommands().front();
    if (sub->get_name() == "validate") return run_validate(cfg);
    const auto result = experiments.at(sub->get_name()).second(cfg);
    const auto written = bmpc::write_result(result, cfg, f.out);
    print_summary(result);
    fmt::print("summary: {}\nmanifest: {}\n", written.summary.string(), written.manifest.string());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
