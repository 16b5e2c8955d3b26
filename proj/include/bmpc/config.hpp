#pragma once

// Experiment configuration documents: a flat YAML mapping, e.g.
//
//   system: double_integrator
//   rho: 0.95
//   c0: 0.01
//   r_scale: 1
//   sigma_w: 0.1
//   sigma_z: 1.0
//   seed: 2025
//
// Recognized keys: system, rho, c0, c1, h, r_scale, sigma_w, sigma_z, seed,
// trials, horizon, steps, parallel, controller, horizons, iterations,
// lbfgs_iters, lbfgs_step, lbfgs_memory. Unknown keys are rejected.

#include <string>

#include <yaml-cpp/yaml.h>

#include "bmpc/experiments.hpp"

namespace bmpc {

inline void apply_config(ExperimentConfig& cfg, const YAML::Node& doc) {
  if (!doc || doc.IsNull()) return;
  require(doc.IsMap(), "config: document must be a key-value mapping");
  for (const auto& kv : doc) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    try {
      if (key == "system") {
        const auto s = v.as<std::string>();
        cfg.systems = s == "both" ? kBothSystems : std::vector<SystemKind>{parse_system(s)};
      } else if (key == "rho") {
        cfg.params.rho = v.as<double>();
      } else if (key == "c0") {
        cfg.params.c0 = v.as<double>();
      } else if (key == "c1") {
        cfg.params.c1 = v.as<double>();
      } else if (key == "h") {
        cfg.params.h = v.as<double>();
      } else if (key == "r_scale") {
        cfg.params.r_scale = v.as<double>();
      } else if (key == "sigma_w") {
        cfg.params.sigma_w = v.as<double>();
      } else if (key == "sigma_z") {
        cfg.params.sigma_z = v.as<double>();
      } else if (key == "seed") {
        cfg.seed = v.as<std::uint64_t>();
      } else if (key == "trials") {
        cfg.trials = v.as<int>();
      } else if (key == "horizon") {
        cfg.horizon = v.as<int>();
      } else if (key == "steps") {
        cfg.steps = v.as<int>();
      } else if (key == "parallel") {
        cfg.parallel = v.as<int>();
      } else if (key == "controller") {
        cfg.controllers = {parse_controller(v.as<std::string>())};
      } else if (key == "horizons") {
        cfg.horizon_grid = v.as<std::vector<int>>();
      } else if (key == "iterations") {
        cfg.iteration_grid = v.as<std::vector<int>>();
      } else if (key == "lbfgs_iters") {
        cfg.lbfgs.max_iters = v.as<int>();
      } else if (key == "lbfgs_step") {
        cfg.lbfgs.step_size = v.as<double>();
      } else if (key == "lbfgs_memory") {
        cfg.lbfgs.memory = v.as<int>();
      } else {
        throw InputError("config: unknown key '" + key + "'");
      }
    } catch (const YAML::Exception& e) {
      throw InputError("config: bad value for '" + key + "': " + e.what());
    }
  }
}

inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  YAML::Node doc;
  try {
    doc = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw InputError("config: cannot read '" + path + "': " + e.what());
  }
  apply_config(cfg, doc);
}

inline void load_config_string(ExperimentConfig& cfg, const std::string& text) {
  apply_config(cfg, YAML::Load(text));
}

}  // namespace bmpc
