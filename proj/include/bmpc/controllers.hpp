#pragma once

// Closed-loop controllers:
//   Sep            full-horizon Riccati feedback on the filter mean
//   Sep-MPC        receding-horizon deterministic LQ on the mean (Riccati form)
//   Sep-MPC/L-BFGS same LQ problem solved by L-BFGS over the input sequence
//   B-MPC          receding-horizon planning over mean and covariance
//
// Near the end of an episode every MPC controller plans with
// H_t = min(H, T - t).

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bmpc/belief_planning.hpp"
#include "bmpc/estimation.hpp"
#include "bmpc/optimizer.hpp"
#include "bmpc/rng.hpp"
#include "bmpc/system_model.hpp"

namespace bmpc {

struct RiccatiTable {
  std::vector<Matrix> gains;   // L_0 .. L_{T-1}, each p x n
  std::vector<Matrix> values;  // K_0 .. K_T, each n x n

  int horizon() const { return static_cast<int>(gains.size()); }
};

// K_T = QT;  L_t = -(B^T K B + R)^{-1} B^T K A;  K_t = A^T K A - P_t + Q.
inline RiccatiTable riccati_backward(const SystemModel& sys, int horizon) {
  require(horizon >= 1, "riccati_backward: horizon must be at least 1");
  RiccatiTable table;
  table.gains.resize(horizon);
  table.values.resize(horizon + 1);
  table.values[horizon] = sys.QT;
  const Matrix at = sys.A.transpose();
  const Matrix bt = sys.B.transpose();
  for (int t = horizon - 1; t >= 0; --t) {
    const Matrix& k_next = table.values[t + 1];
    const Matrix bt_k = bt * k_next;
    const Matrix m = bt_k * sys.B + sys.R;
    Eigen::LLT<Matrix> llt(symmetrize(m));
    if (llt.info() != Eigen::Success) {
      throw NumericError("riccati_backward: B^T K B + R is not positive definite");
    }
    const Matrix bt_k_a = bt_k * sys.A;
    const Matrix x = llt.solve(bt_k_a);
    table.gains[t] = -x;
    const Matrix p_t = bt_k_a.transpose() * x;
    table.values[t] = symmetrize(at * k_next * sys.A - p_t + sys.Q);
  }
  return table;
}

inline Vector sep_action(const RiccatiTable& table, int t, const Vector& xhat) {
  if (t < 0 || t >= table.horizon()) throw InputError("sep_action: time index out of range");
  return table.gains[t] * xhat;
}

inline Matrix sep_mpc_gain(const SystemModel& sys, int horizon) {
  return riccati_backward(sys, horizon).gains.front();
}

// Ignores the covariance.
inline Vector sep_mpc_action(const SystemModel& sys, const Belief& b, int horizon) {
  check_belief(sys, b);
  return sep_mpc_gain(sys, horizon) * b.mean;
}

// Open-loop LQ input sequence from the mean: Riccati feedback applied along
// the nominal trajectory x_{tau+1} = A x_tau + B u_tau.
inline Plan sep_mpc_warm_start(const SystemModel& sys, const Belief& b, int horizon) {
  check_belief(sys, b);
  const RiccatiTable table = riccati_backward(sys, horizon);
  Plan plan(horizon, sys.p());
  Vector x = b.mean;
  for (int t = 0; t < horizon; ++t) {
    Vector u = table.gains[t] * x;
    plan.row(t) = u.transpose();
    x = sys.A * x + sys.B * u;
  }
  return plan;
}

struct PlanResult {
  Vector u;       // first input of the plan
  Plan plan;
  double objective = 0.0;
  int iters = 0;
  bool aborted = false;
};

inline PlanResult optimize_plan(const SystemModel& sys, const Belief& b, const Plan& init,
                                const LbfgsConfig& cfg, PlanCost cost) {
  check_belief(sys, b);
  const auto horizon = init.rows();
  const auto p = sys.p();
  require(horizon >= 1 && init.cols() == p, "optimize_plan: init must be H x p");
  ObjectiveFn f = [&](const Vector& x, Vector& g) {
    Plan u = Eigen::Map<const Plan>(x.data(), horizon, p);
    Plan grad;
    double val;
    try {
      val = evaluate_plan(sys, b, u, cost, &grad);
    } catch (const NumericError&) {
      g.setConstant(std::numeric_limits<double>::quiet_NaN());
      return std::numeric_limits<double>::quiet_NaN();
    }
    g = Eigen::Map<const Vector>(grad.data(), horizon * p);
    return val;
  };
  const Vector x0 = Eigen::Map<const Vector>(init.data(), horizon * p);
  MinimizeResult res = minimize(f, x0, cfg);
  PlanResult out;
  out.plan = Eigen::Map<const Plan>(res.x.data(), horizon, p);
  out.u = out.plan.row(0).transpose();
  out.objective = res.f;
  out.iters = res.iters;
  out.aborted = res.aborted;
  return out;
}

// L-BFGS on the mean-only objective; agrees with sep_mpc_action up to
// optimizer tolerance.
inline PlanResult sep_mpc_action_lbfgs(const SystemModel& sys, const Belief& b, const Plan& init,
                                       const LbfgsConfig& cfg) {
  return optimize_plan(sys, b, init, cfg, PlanCost::kMeanOnly);
}

// Plans over the full belief from an explicit initial plan.
inline PlanResult bmpc_plan(const SystemModel& sys, const Belief& b, const Plan& init,
                            const LbfgsConfig& cfg) {
  return optimize_plan(sys, b, init, cfg, PlanCost::kBelief);
}

inline Plan initial_plan(const SystemModel& sys, const Belief& b, int horizon, InitScheme scheme,
                         CounterStream& stream) {
  return scheme == InitScheme::kRandomGaussian ? random_init(horizon, sys.p(), stream)
                                               : sep_mpc_warm_start(sys, b, horizon);
}

inline PlanResult bmpc_action(const SystemModel& sys, const Belief& b, int horizon,
                              const LbfgsConfig& cfg, InitScheme scheme, CounterStream& stream) {
  return bmpc_plan(sys, b, initial_plan(sys, b, horizon, scheme, stream), cfg);
}

enum class ControllerKind { kSep, kSepMpc, kSepMpcLbfgs, kBMpc };

inline std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::kSep: return "sep";
    case ControllerKind::kSepMpc: return "sep-mpc";
    case ControllerKind::kSepMpcLbfgs: return "sep-mpc-lbfgs";
    case ControllerKind::kBMpc: return "b-mpc";
  }
  return "unknown";
}

inline ControllerKind parse_controller(const std::string& s) {
  for (auto k : {ControllerKind::kSep, ControllerKind::kSepMpc, ControllerKind::kSepMpcLbfgs,
                 ControllerKind::kBMpc}) {
    if (s == to_string(k)) return k;
  }
  throw InputError("unknown controller '" + s + "'");
}

struct ControllerSpec {
  ControllerKind kind = ControllerKind::kSep;
  int horizon = 10;  // ignored by Sep
  LbfgsConfig lbfgs;
  InitScheme init = InitScheme::kRandomGaussian;

  void validate() const {
    require(horizon >= 1, "ControllerSpec: horizon must be at least 1");
    lbfgs.validate();
  }
};

struct ControlOutput {
  Vector u;
  bool aborted = false;
  std::optional<double> objective;
};

// Per-rollout controller instance. Holds the Sep gain table, cached Sep-MPC
// gains per horizon, and the planner-init stream.
class Controller {
 public:
  Controller(const SystemModel& sys, ControllerSpec spec, int total_steps, CounterStream planner)
      : sys_(&sys), spec_(std::move(spec)), total_steps_(total_steps), planner_(planner) {
    spec_.validate();
    require(total_steps_ >= 1, "Controller: total steps must be at least 1");
    if (spec_.kind == ControllerKind::kSep) table_ = riccati_backward(sys, total_steps_);
  }

  int planning_horizon(int t) const { return std::min(spec_.horizon, total_steps_ - t); }

  ControlOutput act(const Belief& b, int t) {
    if (t < 0 || t >= total_steps_) throw InputError("Controller::act: time index out of range");
    switch (spec_.kind) {
      case ControllerKind::kSep:
        return {sep_action(*table_, t, b.mean), false, std::nullopt};
      case ControllerKind::kSepMpc:
        return {gain_for(planning_horizon(t)) * b.mean, false, std::nullopt};
      case ControllerKind::kSepMpcLbfgs: {
        const int h = planning_horizon(t);
        PlanResult r = sep_mpc_action_lbfgs(*sys_, b, initial_plan(*sys_, b, h, spec_.init, planner_),
                                            spec_.lbfgs);
        return {std::move(r.u), r.aborted, r.objective};
      }
      case ControllerKind::kBMpc: {
        PlanResult r =
            bmpc_action(*sys_, b, planning_horizon(t), spec_.lbfgs, spec_.init, planner_);
        return {std::move(r.u), r.aborted, r.objective};
      }
    }
    throw InputError("Controller::act: unknown controller kind");
  }

  const ControllerSpec& spec() const { return spec_; }

 private:
  const Matrix& gain_for(int horizon) {
    auto it = gains_.find(horizon);
    if (it == gains_.end()) it = gains_.emplace(horizon, sep_mpc_gain(*sys_, horizon)).first;
    return it->second;
  }

  const SystemModel* sys_;
  ControllerSpec spec_;
  int total_steps_;
  CounterStream planner_;
  std::optional<RiccatiTable> table_;
  std::map<int, Matrix> gains_;
};

}  // namespace bmpc
