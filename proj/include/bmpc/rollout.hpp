#pragma once

#include <chrono>
#include <vector>

#include "bmpc/controllers.hpp"
#include "bmpc/estimation.hpp"
#include "bmpc/system_model.hpp"

namespace bmpc {

// Per-step log of one closed-loop trajectory. Costs are charged on the true
// state: sum_t (x^T Q x + u^T R u) + x_T^T QT x_T.
struct RolloutRecord {
  std::vector<Vector> x;        // t = 0..T (x[T] is the terminal state)
  std::vector<Belief> beliefs;  // t = 0..T
  std::vector<Vector> u;        // t = 0..T-1
  std::vector<Vector> y;        // t = 0..T-1
  std::vector<double> state_cost;
  std::vector<double> input_cost;
  double terminal_cost = 0.0;
  double state_cost_sum = 0.0;
  double input_cost_sum = 0.0;
  double total_cost = 0.0;
  double wall_clock_seconds = 0.0;
  int optimizer_aborts = 0;

  int steps() const { return static_cast<int>(u.size()); }
  double tr_sigma(int t) const { return beliefs[t].cov.trace(); }
  double est_err(int t) const { return (x[t] - beliefs[t].mean).norm(); }
};

inline RolloutRecord rollout(const SystemModel& sys, const ControllerSpec& spec, int steps,
                             const NoiseRealization& noise, CounterStream planner_stream) {
  require(steps >= 1 && noise.steps() == steps && noise.zs.size() == noise.ws.size(),
          "rollout: noise realization must have length T");
  RolloutRecord rec;
  rec.x.reserve(steps + 1);
  rec.beliefs.reserve(steps + 1);
  rec.u.reserve(steps);
  rec.y.reserve(steps);
  rec.state_cost.reserve(steps);
  rec.input_cost.reserve(steps);

  const auto start = std::chrono::steady_clock::now();
  Controller controller(sys, spec, steps, planner_stream);
  Belief b = prior_belief(sys);
  Vector x = noise.x0;
  for (int t = 0; t < steps; ++t) {
    ControlOutput out = controller.act(b, t);
    if (out.aborted) ++rec.optimizer_aborts;
    StepResult step = simulate_step(sys, x, out.u, noise.ws[t], noise.zs[t]);
    Belief next = kalman_update(sys, b, out.u, step.y);

    rec.state_cost.push_back(x.dot(sys.Q * x));
    rec.input_cost.push_back(out.u.dot(sys.R * out.u));
    rec.x.push_back(std::move(x));
    rec.beliefs.push_back(std::move(b));
    rec.u.push_back(std::move(out.u));
    rec.y.push_back(std::move(step.y));
    x = std::move(step.x_next);
    b = std::move(next);
  }
  rec.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  rec.terminal_cost = x.dot(sys.QT * x);
  rec.x.push_back(std::move(x));
  rec.beliefs.push_back(std::move(b));
  for (int t = 0; t < steps; ++t) {
    rec.state_cost_sum += rec.state_cost[t];
    rec.input_cost_sum += rec.input_cost[t];
  }
  rec.total_cost = rec.state_cost_sum + rec.input_cost_sum + rec.terminal_cost;
  return rec;
}

}  // namespace bmpc
