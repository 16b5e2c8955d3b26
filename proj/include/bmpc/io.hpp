#pragma once

// Result files:
//   <out>/<experiment>_summary.csv          experiment,system,controller,<axes>,mean,stderr,ci95[,extras]
//   <out>/<experiment>_<table>.csv          experiment-specific tables
//   <out>/raw/<experiment>/trial_<i>.csv    system,controller,<axes>,t,state_cost,input_cost,tr_sigma,est_err,u_1..u_p
//   <out>/<experiment>_manifest.json        config snapshot, seeds, artifact paths

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "bmpc/experiments.hpp"

namespace bmpc {

namespace fs = std::filesystem;

inline std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

inline std::vector<std::string> summary_header(const ExperimentResult& res) {
  std::vector<std::string> h = {"experiment", "system", "controller"};
  h.insert(h.end(), res.axis_names.begin(), res.axis_names.end());
  h.insert(h.end(), {"mean", "stderr", "ci95"});
  h.insert(h.end(), res.extra_names.begin(), res.extra_names.end());
  return h;
}

inline std::string summary_csv(const ExperimentResult& res) {
  std::string out = csv_line(summary_header(res));
  for (const auto& r : res.rows) {
    std::vector<std::string> cells = {res.experiment, r.system, r.controller};
    cells.insert(cells.end(), r.axes.begin(), r.axes.end());
    cells.insert(cells.end(), {fmt_num(r.stats.mean), fmt_num(r.stats.stderr_), fmt_num(r.stats.ci95)});
    for (double e : r.extras) cells.push_back(fmt_num(e));
    out += csv_line(cells);
  }
  return out;
}

inline std::string table_csv(const Table& t) {
  std::string out = csv_line(t.header);
  for (const auto& row : t.rows) out += csv_line(row);
  return out;
}

// Raw series grouped by trial index.
inline std::map<int, std::string> raw_csvs(const ExperimentResult& res) {
  std::map<int, std::string> out;
  for (const auto& s : res.raw) {
    std::string& doc = out[s.trial];
    if (doc.empty()) {
      std::vector<std::string> h = {"system", "controller"};
      h.insert(h.end(), res.axis_names.begin(), res.axis_names.end());
      h.insert(h.end(), {"t", "state_cost", "input_cost", "tr_sigma", "est_err"});
      for (Eigen::Index k = 5; k < s.data.cols(); ++k) h.push_back(fmt::format("u_{}", k - 4));
      doc = csv_line(h);
    }
    for (Eigen::Index t = 0; t < s.data.rows(); ++t) {
      std::vector<std::string> cells = {s.system, s.controller};
      cells.insert(cells.end(), s.axes.begin(), s.axes.end());
      cells.resize(2 + res.axis_names.size());
      cells.push_back(fmt_num(static_cast<int>(s.data(t, 0))));
      for (Eigen::Index k = 1; k < s.data.cols(); ++k) cells.push_back(fmt_num(s.data(t, k)));
      doc += csv_line(cells);
    }
  }
  return out;
}

inline void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
}

inline nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  std::vector<std::string> systems;
  for (auto s : cfg.systems) systems.push_back(to_string(s));
  j["systems"] = systems;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j["params"][key] = *v;
  };
  j["params"] = nlohmann::json::object();
  put("rho", cfg.params.rho);
  put("c0", cfg.params.c0);
  put("c1", cfg.params.c1);
  put("h", cfg.params.h);
  put("r_scale", cfg.params.r_scale);
  put("sigma_w", cfg.params.sigma_w);
  put("sigma_z", cfg.params.sigma_z);
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["horizon"] = cfg.horizon ? nlohmann::json(*cfg.horizon) : nlohmann::json(nullptr);
  j["steps"] = cfg.steps ? nlohmann::json(*cfg.steps) : nlohmann::json(nullptr);
  j["horizon_grid"] = cfg.horizon_grid;
  j["iteration_grid"] = cfg.iteration_grid;
  std::vector<std::string> controllers;
  for (auto c : cfg.controllers) controllers.push_back(to_string(c));
  j["controllers"] = controllers;
  j["lbfgs"] = {{"max_iters", cfg.lbfgs.max_iters},
                {"step_size", cfg.lbfgs.step_size},
                {"memory", cfg.lbfgs.memory},
                {"grad_tol", cfg.lbfgs.grad_tol}};
  j["parallel"] = cfg.parallel;
  return j;
}

struct WrittenArtifacts {
  fs::path summary;
  std::vector<fs::path> tables;
  std::vector<fs::path> raw;
  fs::path manifest;
};

inline WrittenArtifacts write_result(const ExperimentResult& res, const ExperimentConfig& cfg,
                                     const fs::path& out_dir) {
  WrittenArtifacts w;
  w.summary = out_dir / (res.experiment + "_summary.csv");
  write_text(w.summary, summary_csv(res));
  for (const auto& t : res.tables) {
    w.tables.push_back(out_dir / (res.experiment + "_" + t.name + ".csv"));
    write_text(w.tables.back(), table_csv(t));
  }
  for (const auto& [trial, doc] : raw_csvs(res)) {
    w.raw.push_back(out_dir / "raw" / res.experiment / fmt::format("trial_{:02d}.csv", trial));
    write_text(w.raw.back(), doc);
  }
  nlohmann::json m;
  m["experiment"] = res.experiment;
  m["config"] = config_json(cfg);
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < cfg.trials; ++i) seeds.push_back(trial_seed(cfg.seed, res.experiment, i));
  m["trial_seeds"] = seeds;
  m["summary"] = fs::relative(w.summary, out_dir).string();
  m["summary_columns"] = summary_header(res);
  m["timing_columns"] = res.timing_columns;
  for (const auto& p : w.tables) m["tables"].push_back(fs::relative(p, out_dir).string());
  m["raw"] = nlohmann::json::array();
  for (const auto& p : w.raw) m["raw"].push_back(fs::relative(p, out_dir).string());
  w.manifest = out_dir / (res.experiment + "_manifest.json");
  write_text(w.manifest, m.dump(2) + "\n");
  return w;
}

}  // namespace bmpc
