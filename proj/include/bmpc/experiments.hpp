#pragma once

// Matched-noise closed-loop experiments. Every (cell, trial) job samples one
// noise realization from the trial seed and runs all controllers of the cell
// against it; jobs are independent and may run in parallel.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bmpc/controllers.hpp"
#include "bmpc/parallel.hpp"
#include "bmpc/rollout.hpp"
#include "bmpc/stats.hpp"
#include "bmpc/system_model.hpp"

namespace bmpc {

struct ParamOverrides {
  std::optional<double> rho, c0, c1, h, r_scale, sigma_w, sigma_z;
};

// Benchmark configuration used throughout: rho 0.95, c0 0.01, R = I,
// sigma_w 0.1, and sigma_z 0.1 (random) or 1.0 (double integrator).
inline SystemParams benchmark_params(SystemKind kind) {
  SystemParams p;
  p.sigma_z = kind == SystemKind::kRandom ? 0.1 : 1.0;
  return p;
}

inline int benchmark_horizon(SystemKind kind) { return kind == SystemKind::kRandom ? 10 : 15; }

inline SystemKind parse_system(const std::string& s) {
  if (s == "random") return SystemKind::kRandom;
  if (s == "double-integrator" || s == "double_integrator") return SystemKind::kDoubleIntegrator;
  throw InputError("unknown system '" + s + "'");
}

struct ExperimentConfig {
  std::vector<SystemKind> systems;  // empty: experiment default
  ParamOverrides params;
  std::uint64_t seed = 2025;
  int trials = 10;
  std::optional<int> horizon;       // default per system
  std::optional<int> steps;         // default 300 (100 for init-study)
  std::vector<int> horizon_grid;    // h-sweep, heatmap, runtime
  std::vector<int> iteration_grid;  // init-study
  std::vector<ControllerKind> controllers;  // empty: experiment default
  LbfgsConfig lbfgs;
  int parallel = 1;

  SystemParams params_for(SystemKind kind) const {
    SystemParams p = benchmark_params(kind);
    if (params.rho) p.rho = *params.rho;
    if (params.c0) p.c0 = *params.c0;
    if (params.c1) p.c1 = *params.c1;
    if (params.h) p.h = *params.h;
    if (params.r_scale) p.r_scale = *params.r_scale;
    if (params.sigma_w) p.sigma_w = *params.sigma_w;
    if (params.sigma_z) p.sigma_z = *params.sigma_z;
    return p;
  }
  int horizon_for(SystemKind kind) const { return horizon.value_or(benchmark_horizon(kind)); }
  std::vector<SystemKind> systems_or(std::vector<SystemKind> fallback) const {
    return systems.empty() ? fallback : systems;
  }
  std::vector<ControllerKind> controllers_or(std::vector<ControllerKind> fallback) const {
    return controllers.empty() ? fallback : controllers;
  }
  void validate() const {
    require(trials >= 1, "trials must be at least 1");
    require(!horizon || *horizon >= 1, "horizon must be at least 1");
    require(!steps || *steps >= 1, "steps must be at least 1");
    require(parallel >= 1, "parallel must be at least 1");
    for (int h : horizon_grid) require(h >= 1, "horizon grid entries must be positive");
    for (int k : iteration_grid) require(k >= 0, "iteration grid entries must be non-negative");
    lbfgs.validate();
  }
};

inline const std::vector<SystemKind> kBothSystems = {SystemKind::kRandom,
                                                     SystemKind::kDoubleIntegrator};
inline const std::vector<ControllerKind> kMainControllers = {
    ControllerKind::kSep, ControllerKind::kSepMpc, ControllerKind::kBMpc};
inline const std::vector<int> kHorizonGrid = {5, 10, 15, 20, 25, 30};
inline const std::vector<double> kRhoGrid = {0.85, 0.9, 0.95, 1.0, 1.05, 1.1};
inline const std::vector<double> kRScaleGrid = {1.0, 10.0, 100.0};
inline const std::vector<double> kC0Grid = {0.01, 0.1, 1.0};
inline const std::vector<int> kIterationGrid = {0, 1, 2, 3, 5, 10, 15, 20};

// 17 significant digits, '.' decimal separator.
inline std::string fmt_num(double v) { return fmt::format("{:.17g}", v); }
inline std::string fmt_num(int v) { return fmt::format("{}", v); }

inline std::uint64_t trial_seed(std::uint64_t master, const std::string& experiment, int trial) {
  return derive_key(master, hash_string(experiment), static_cast<std::uint64_t>(trial));
}

struct SummaryRow {
  std::string system;
  std::string controller;
  std::vector<std::string> axes;
  Summary stats;
  std::vector<double> extras;
};

// Per-step series of one rollout: columns t, state_cost, input_cost,
// tr_sigma, est_err, u_1..u_p. The final row (t = T) holds the terminal
// cost in the state_cost column and zero input.
struct RawSeries {
  int trial = 0;
  std::string system;
  std::string controller;
  std::vector<std::string> axes;
  Matrix data;
};

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<std::string> axis_names;
  std::vector<std::string> extra_names;
  std::vector<std::string> timing_columns;  // summary columns holding wall-clock values
  std::vector<SummaryRow> rows;
  std::vector<RawSeries> raw;
  std::vector<Table> tables;

  const SummaryRow* find(const std::string& system, const std::string& controller,
                         const std::vector<std::string>& axes) const {
    for (const auto& r : rows) {
      if (r.system == system && r.controller == controller && r.axes == axes) return &r;
    }
    return nullptr;
  }
  const SummaryRow& at(const std::string& system, const std::string& controller,
                       const std::vector<std::string>& axes) const {
    const SummaryRow* r = find(system, controller, axes);
    if (r == nullptr) throw InputError("no summary row for " + system + "/" + controller);
    return *r;
  }
  const Table* table(const std::string& name) const {
    for (const auto& t : tables) {
      if (t.name == name) return &t;
    }
    return nullptr;
  }
};

inline Matrix raw_series(const RolloutRecord& rec) {
  const int steps = rec.steps();
  const auto p = rec.u.empty() ? 0 : rec.u.front().size();
  Matrix out(steps + 1, 5 + p);
  for (int t = 0; t <= steps; ++t) {
    const bool terminal = t == steps;
    out(t, 0) = t;
    out(t, 1) = terminal ? rec.terminal_cost : rec.state_cost[t];
    out(t, 2) = terminal ? 0.0 : rec.input_cost[t];
    out(t, 3) = rec.tr_sigma(t);
    out(t, 4) = rec.est_err(t);
    for (Eigen::Index k = 0; k < p; ++k) out(t, 5 + k) = terminal ? 0.0 : rec.u[t][k];
  }
  return out;
}

// Scalars kept from one rollout once its record is compacted.
struct TrialOutcome {
  double total = 0.0;
  double state = 0.0;
  double input = 0.0;
  double terminal = 0.0;
  double wall_clock = 0.0;
  int aborts = 0;
  Matrix raw;
};

struct Cell {
  SystemKind system = SystemKind::kRandom;
  SystemParams params;
  std::vector<std::string> axes;
  std::vector<ControllerSpec> specs;
  std::vector<std::string> labels;
  int steps = 300;
};

// outcomes[cell][controller][trial]
using CellOutcomes = std::vector<std::vector<std::vector<TrialOutcome>>>;

inline CellOutcomes run_cells(const std::vector<Cell>& cells, const ExperimentConfig& cfg,
                              const std::string& experiment, int threads) {
  CellOutcomes out(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    out[c].assign(cells[c].specs.size(), std::vector<TrialOutcome>(cfg.trials));
  }
  const int jobs = static_cast<int>(cells.size()) * cfg.trials;
  parallel_for(jobs, threads, [&](int job) {
    const auto c = static_cast<std::size_t>(job / cfg.trials);
    const int trial = job % cfg.trials;
    const Cell& cell = cells[c];
    const SystemModel sys = make_system(cell.system, cell.params, cfg.seed);
    const std::uint64_t key = trial_seed(cfg.seed, experiment, trial);
    const NoiseRealization noise = sample_noise(sys, cell.steps, key);
    const CounterStream planner(key, StreamTag::kPlannerInit);
    for (std::size_t k = 0; k < cell.specs.size(); ++k) {
      RolloutRecord rec = rollout(sys, cell.specs[k], cell.steps, noise, planner);
      TrialOutcome& o = out[c][k][trial];
      o.total = rec.total_cost;
      o.state = rec.state_cost_sum;
      o.input = rec.input_cost_sum;
      o.terminal = rec.terminal_cost;
      o.wall_clock = rec.wall_clock_seconds;
      o.aborts = rec.optimizer_aborts;
      o.raw = raw_series(rec);
    }
  });
  return out;
}

namespace detail {

inline ControllerSpec make_spec(ControllerKind kind, int horizon, const LbfgsConfig& lbfgs,
                                InitScheme init = InitScheme::kRandomGaussian) {
  ControllerSpec s;
  s.kind = kind;
  s.horizon = horizon;
  s.lbfgs = lbfgs;
  s.init = init;
  return s;
}

inline Cell controller_cell(SystemKind kind, const SystemParams& prm, int horizon, int steps,
                            const std::vector<ControllerKind>& controllers,
                            const LbfgsConfig& lbfgs, std::vector<std::string> axes) {
  Cell cell;
  cell.system = kind;
  cell.params = prm;
  cell.steps = steps;
  cell.axes = std::move(axes);
  for (auto k : controllers) {
    cell.specs.push_back(make_spec(k, horizon, lbfgs));
    cell.labels.push_back(to_string(k));
  }
  return cell;
}

template <typename Metric>
inline std::vector<double> collect(const std::vector<TrialOutcome>& trials, Metric metric) {
  std::vector<double> xs;
  xs.reserve(trials.size());
  for (const auto& t : trials) xs.push_back(metric(t));
  return xs;
}

inline void append_raw(ExperimentResult& res, const std::vector<Cell>& cells,
                       CellOutcomes& outcomes) {
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t k = 0; k < cells[c].specs.size(); ++k) {
      for (std::size_t i = 0; i < outcomes[c][k].size(); ++i) {
        res.raw.push_back({static_cast<int>(i), to_string(cells[c].system), cells[c].labels[k],
                           cells[c].axes, std::move(outcomes[c][k][i].raw)});
      }
    }
  }
}

// One summary row per (cell, controller) using total cost.
inline void summarize_totals(ExperimentResult& res, const std::vector<Cell>& cells,
                             const CellOutcomes& outcomes) {
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t k = 0; k < cells[c].specs.size(); ++k) {
      res.rows.push_back({to_string(cells[c].system), cells[c].labels[k], cells[c].axes,
                          summarize(collect(outcomes[c][k], [](auto& t) { return t.total; })),
                          {}});
    }
  }
}

inline int steps_or(const ExperimentConfig& cfg, int fallback) { return cfg.steps.value_or(fallback); }

}  // namespace detail

// Total cost versus planning horizon.
inline ExperimentResult run_h_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.experiment = "h-sweep";
  res.axis_names = {"horizon"};
  const auto grid = cfg.horizon_grid.empty() ? kHorizonGrid : cfg.horizon_grid;
  std::vector<Cell> cells;
  for (auto kind : cfg.systems_or(kBothSystems)) {
    for (int h : grid) {
      cells.push_back(detail::controller_cell(kind, cfg.params_for(kind), h,
                                              detail::steps_or(cfg, 300),
                                              cfg.controllers_or(kMainControllers), cfg.lbfgs,
                                              {fmt_num(h)}));
    }
  }
  auto outcomes = run_cells(cells, cfg, res.experiment, cfg.parallel);
  detail::summarize_totals(res, cells, outcomes);
  detail::append_raw(res, cells, outcomes);
  return res;
}

// State / input / terminal / total cost means at the benchmark horizon.
inline ExperimentResult run_cost_decomposition(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.experiment = "decompose";
  res.axis_names = {"horizon", "metric"};
  std::vector<Cell> cells;
  for (auto kind : cfg.systems_or(kBothSystems)) {
    const int h = cfg.horizon_for(kind);
    cells.push_back(detail::controller_cell(kind, cfg.params_for(kind), h,
                                            detail::steps_or(cfg, 300),
                                            cfg.controllers_or(kMainControllers), cfg.lbfgs,
                                            {fmt_num(h)}));
  }
  auto outcomes = run_cells(cells, cfg, res.experiment, cfg.parallel);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t k = 0; k < cells[c].specs.size(); ++k) {
      const auto& trials = outcomes[c][k];
      const std::pair<const char*, double TrialOutcome::*> metrics[] = {
          {"state", &TrialOutcome::state},
          {"input", &TrialOutcome::input},
          {"terminal", &TrialOutcome::terminal},
          {"total", &TrialOutcome::total}};
      for (const auto& [name, field] : metrics) {
        res.rows.push_back({to_string(cells[c].system), cells[c].labels[k],
                            {cells[c].axes[0], name},
                            summarize(detail::collect(trials, [f = field](auto& t) { return t.*f; })),
                            {}});
      }
    }
  }
  detail::append_raw(res, cells, outcomes);
  return res;
}

// Per-step estimation error and covariance trace.
inline ExperimentResult run_kf_diagnostics(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.experiment = "kf-diag";
  res.axis_names = {"horizon", "metric", "t"};
  std::vector<Cell> cells;
  for (auto kind : cfg.systems_or({SystemKind::kDoubleIntegrator})) {
    const int h = cfg.horizon_for(kind);
    cells.push_back(detail::controller_cell(kind, cfg.params_for(kind), h,
                                            detail::steps_or(cfg, 300),
                                            cfg.controllers_or(kMainControllers), cfg.lbfgs,
                                            {fmt_num(h)}));
  }
  auto outcomes = run_cells(cells, cfg, res.experiment, cfg.parallel);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t k = 0; k < cells[c].specs.size(); ++k) {
      const auto& trials = outcomes[c][k];
      const std::pair<const char*, int> metrics[] = {{"est_err", 4}, {"tr_sigma", 3}};
      for (const auto& [name, col] : metrics) {
        for (int t = 0; t <= cells[c].steps; ++t) {
          res.rows.push_back(
              {to_string(cells[c].system), cells[c].labels[k],
               {cells[c].axes[0], name, fmt_num(t)},
               summarize(detail::collect(trials, [t, col = col](auto& o) { return o.raw(t, col); })),
               {}});
        }
      }
    }
  }
  detail::append_raw(res, cells, outcomes);
  return res;
}

// Drives one Sep-MPC trajectory and, at each visited belief, also solves
// B-MPC. Emits (t, coord, u_sep_mpc, u_b_mpc) pairs.
inline ExperimentResult run_counterfactual(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.experiment = "counterfactual";
  res.axis_names = {"horizon", "coord"};
  res.extra_names = {"std"};
  Table pairs{"pairs", {"system", "t", "coord", "u_sep_mpc", "u_b_mpc"}, {}};
  for (auto kind : cfg.systems_or(kBothSystems)) {
    const SystemModel sys = make_system(kind, cfg.params_for(kind), cfg.seed);
    const int h = cfg.horizon_for(kind);
    const int steps = detail::steps_or(cfg, 300);
    const std::uint64_t key = trial_seed(cfg.seed, res.experiment, 0);
    const NoiseRealization noise = sample_noise(sys, steps, key);
    CounterStream planner(key, StreamTag::kPlannerInit);
    const RolloutRecord rec =
        rollout(sys, detail::make_spec(ControllerKind::kSepMpc, h, cfg.lbfgs), steps, noise, planner);

    std::vector<Vector> bmpc(steps);
    for (int t = 0; t < steps; ++t) {
      const int ht = std::min(h, steps - t);
      bmpc[t] = bmpc_action(sys, rec.beliefs[t], ht, cfg.lbfgs, InitScheme::kRandomGaussian, planner).u;
    }
    for (Eigen::Index k = 0; k < sys.p(); ++k) {
      std::vector<double> a, b;
      for (int t = 0; t < steps; ++t) {
        a.push_back(rec.u[t][k]);
        b.push_back(bmpc[t][k]);
        pairs.rows.push_back({to_string(kind), fmt_num(t), fmt_num(static_cast<int>(k + 1)),
                              fmt_num(rec.u[t][k]), fmt_num(bmpc[t][k])});
      }
      const std::vector<std::string> axes = {fmt_num(h), fmt_num(static_cast<int>(k + 1))};
      res.rows.push_back({to_string(kind), "sep-mpc", axes, summarize(a), {sample_stddev(a)}});
      res.rows.push_back({to_string(kind), "b-mpc", axes, summarize(b), {sample_stddev(b)}});
    }
  }
  res.tables.push_back(std::move(pairs));
  return res;
}

// ||u_B-MPC - u_Sep-MPC|| at synthetic beliefs (x ~ N(0, 0.25 I), S = alpha I).
inline ExperimentResult run_synthetic_gap(const ExperimentConfig& cfg, int beliefs = 10,
                                          int alphas = 20) {
  cfg.validate();
  ExperimentResult res;
  res.experiment = "synthetic-gap";
  res.axis_names = {"horizon", "alpha", "tr_sigma"};
  res.extra_names = {"median", "q25", "q75"};
  Table points{"points", {"system", "belief", "alpha", "tr_sigma", "gap"}, {}};
  for (auto kind : cfg.systems_or(kBothSystems)) {
    const SystemModel sys = make_system(kind, cfg.params_for(kind), cfg.seed);
    const auto n = sys.n();
    const int h = cfg.horizon_for(kind);
    const auto alpha_grid = logspace(0.01, 190.0 / static_cast<double>(n), alphas);
    CounterStream mean_stream(trial_seed(cfg.seed, res.experiment, 0), StreamTag::kSynthetic);
    std::vector<Vector> means;
    for (int i = 0; i < beliefs; ++i) means.push_back(0.5 * mean_stream.normal_vector(n));

    std::vector<double> gaps(static_cast<std::size_t>(beliefs) * alphas);
    parallel_for(beliefs * alphas, cfg.parallel, [&](int job) {
      const int i = job / alphas, j = job % alphas;
      const Belief b{means[i], alpha_grid[j] * Matrix::Identity(n, n)};
      CounterStream planner(trial_seed(cfg.seed, res.experiment, job), StreamTag::kPlannerInit);
      const Vector ub = bmpc_action(sys, b, h, cfg.lbfgs, InitScheme::kRandomGaussian, planner).u;
      gaps[job] = (ub - sep_mpc_action(sys, b, h)).norm();
    });
    for (int j = 0; j < alphas; ++j) {
      std::vector<double> col;
      for (int i = 0; i < beliefs; ++i) {
        const double g = gaps[i * alphas + j];
        col.push_back(g);
        points.rows.push_back({to_string(kind), fmt_num(i), fmt_num(alpha_grid[j]),
                               fmt_num(alpha_grid[j] * n), fmt_num(g)});
      }
      res.rows.push_back({to_string(kind), "b-mpc-vs-sep-mpc",
                          {fmt_num(h), fmt_num(alpha_grid[j]), fmt_num(alpha_grid[j] * n)},
                          summarize(col),
                          {median(col), quantile(col, 0.25), quantile(col, 0.75)}});
    }
  }
  res.tables.push_back(std::move(points));
  return res;
}

// Percentage gain of B-MPC over Sep on the (r_scale, c0) grid, taking for
// each cell the horizon with the lowest mean B-MPC cost.
inline ExperimentResult run_heatmap(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.experiment = "heatmap";
  res.axis_names = {"r_scale", "c0", "horizon"};
  const auto grid = cfg.horizon_grid.empty() ? kHorizonGrid : cfg.horizon_grid;
  const int steps = detail::steps_or(cfg, 300);
  std::vector<Cell> cells;
  for (auto kind : cfg.systems_or(kBothSystems)) {
    for (double rs : kRScaleGrid) {
      for (double c0 : kC0Grid) {
        SystemParams prm = cfg.params_for(kind);
        prm.r_scale = rs;
        prm.c0 = c0;
        prm.rho = 0.95;
        Cell cell;
        cell.system = kind;
        cell.params = prm;
        cell.steps = steps;
        cell.axes = {fmt_num(rs), fmt_num(c0)};
        cell.specs.push_back(detail::make_spec(ControllerKind::kSep, 1, cfg.lbfgs));
        cell.labels.push_back("sep");
        for (int h : grid) {
          cell.specs.push_back(detail::make_spec(ControllerKind::kBMpc, h, cfg.lbfgs));
          cell.labels.push_back("b-mpc");
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  auto outcomes = run_cells(cells, cfg, res.experiment, cfg.parallel);

  Table heat{"cells", {"system", "r_scale", "c0", "best_horizon", "sep_mean", "b_mpc_mean", "gain_pct"}, {}};
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto totals = [&](std::size_t k) {
      return detail::collect(outcomes[c][k], [](auto& t) { return t.total; });
    };
    const Summary sep = summarize(totals(0));
    res.rows.push_back({to_string(cells[c].system), "sep", {cells[c].axes[0], cells[c].axes[1], ""}, sep, {}});
    std::size_t best = 1;
    double best_mean = 0.0;
    for (std::size_t k = 1; k < cells[c].specs.size(); ++k) {
      const Summary s = summarize(totals(k));
      const int h = cells[c].specs[k].horizon;
      res.rows.push_back({to_string(cells[c].system), "b-mpc",
                          {cells[c].axes[0], cells[c].axes[1], fmt_num(h)}, s, {}});
      if (k == 1 || s.mean < best_mean) {
        best = k;
        best_mean = s.mean;
      }
    }
    heat.rows.push_back({to_string(cells[c].system), cells[c].axes[0], cells[c].axes[1],
                         fmt_num(cells[c].specs[best].horizon), fmt_num(sep.mean),
                         fmt_num(best_mean), fmt_num(100.0 * (sep.mean - best_mean) / sep.mean)});
    for (std::size_t k = 0; k < cells[c].specs.size(); ++k) {
      cells[c].labels[k] =
          k == 0 ? "sep" : "b-mpc-h" + fmt_num(cells[c].specs[k].horizon);
    }
  }
  detail::append_raw(res, cells, outcomes);
  res.tables.push_back(std::move(heat));
  return res;
}

// Total cost versus spectral radius at the benchmark horizon.
inline ExperimentResult run_rho_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.experiment = "rho-sweep";
  res.axis_names = {"horizon", "rho"};
  std::vector<Cell> cells;
  for (auto kind : cfg.systems_or(kBothSystems)) {
    const int h = cfg.horizon_for(kind);
    for (double rho : kRhoGrid) {
      SystemParams prm = cfg.params_for(kind);
      prm.rho = rho;
      cells.push_back(detail::controller_cell(kind, prm, h, detail::steps_or(cfg, 300),
                                              cfg.controllers_or(kMainControllers), cfg.lbfgs,
                                              {fmt_num(h), fmt_num(rho)}));
    }
  }
  auto outcomes = run_cells(cells, cfg, res.experiment, cfg.parallel);
  detail::summarize_totals(res, cells, outcomes);
  detail::append_raw(res, cells, outcomes);
  return res;
}

// Wall-clock seconds per closed-loop trajectory. Always sequential.
inline ExperimentResult run_runtime_study(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.experiment = "runtime";
  res.axis_names = {"horizon"};
  res.timing_columns = {"mean", "stderr", "ci95"};
  const auto grid = cfg.horizon_grid.empty() ? kHorizonGrid : cfg.horizon_grid;
  const std::vector<ControllerKind> all = {ControllerKind::kSep, ControllerKind::kSepMpc,
                                           ControllerKind::kSepMpcLbfgs, ControllerKind::kBMpc};
  std::vector<Cell> cells;
  for (auto kind : cfg.systems_or(kBothSystems)) {
    for (int h : grid) {
      cells.push_back(detail::controller_cell(kind, cfg.params_for(kind), h,
                                              detail::steps_or(cfg, 300), cfg.controllers_or(all),
                                              cfg.lbfgs, {fmt_num(h)}));
    }
  }
  auto outcomes = run_cells(cells, cfg, res.experiment, 1);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t k = 0; k < cells[c].specs.size(); ++k) {
      res.rows.push_back(
          {to_string(cells[c].system), cells[c].labels[k], cells[c].axes,
           summarize(detail::collect(outcomes[c][k], [](auto& t) { return t.wall_clock; })), {}});
    }
  }
  detail::append_raw(res, cells, outcomes);
  return res;
}

// B-MPC rollout cost versus the L-BFGS iteration budget for random and
// Sep-MPC warm-start initialization.
inline ExperimentResult run_init_study(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.experiment = "init-study";
  res.axis_names = {"horizon", "max_iters"};
  const auto grid = cfg.iteration_grid.empty() ? kIterationGrid : cfg.iteration_grid;
  const int h = cfg.horizon.value_or(15);
  std::vector<Cell> cells;
  for (auto kind : cfg.systems_or(kBothSystems)) {
    for (int iters : grid) {
      LbfgsConfig lb = cfg.lbfgs;
      lb.max_iters = iters;
      Cell cell;
      cell.system = kind;
      cell.params = cfg.params_for(kind);
      cell.steps = detail::steps_or(cfg, 100);
      cell.axes = {fmt_num(h), fmt_num(iters)};
      cell.specs.push_back(detail::make_spec(ControllerKind::kBMpc, h, lb, InitScheme::kRandomGaussian));
      cell.labels.push_back("b-mpc-random-init");
      cell.specs.push_back(detail::make_spec(ControllerKind::kBMpc, h, lb, InitScheme::kSepMpcWarmStart));
      cell.labels.push_back("b-mpc-sep-mpc-init");
      cells.push_back(std::move(cell));
    }
  }
  auto outcomes = run_cells(cells, cfg, res.experiment, cfg.parallel);
  detail::summarize_totals(res, cells, outcomes);
  detail::append_raw(res, cells, outcomes);
  return res;
}

}  // namespace bmpc
