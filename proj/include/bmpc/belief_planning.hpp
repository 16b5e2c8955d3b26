#pragma once

// Deterministic belief-space planning objective.
//
// Future observations are replaced by their nominal values, so the planned
// mean follows the open-loop prediction while the covariance follows the
// input-dependent filter recursion. Over a horizon H the objective is
//
//   J(u) = phi(b_H) + sum_{tau < H} l(b_tau, u_tau)
//   l(b, u) = x^T Q x + tr(Q S) + u^T R u,   phi(b) = x^T QT x + tr(QT S)
//
// and its gradient is accumulated backwards through the recursion.

#include <vector>

#include "bmpc/estimation.hpp"
#include "bmpc/linalg.hpp"
#include "bmpc/system_model.hpp"

namespace bmpc {

// kBelief is the full objective. kMeanOnly drops the trace terms and the
// covariance recursion, leaving the deterministic LQ problem.
enum class PlanCost { kBelief, kMeanOnly };

struct PlanningProblem {
  const SystemModel* sys = nullptr;
  Belief root;
  int horizon = 1;
  Plan inputs;  // horizon x p
  PlanCost cost = PlanCost::kBelief;

  PlanningProblem(const SystemModel& s, Belief b, int h, Plan u, PlanCost c = PlanCost::kBelief)
      : sys(&s), root(std::move(b)), horizon(h), inputs(std::move(u)), cost(c) {
    require(horizon >= 1, "PlanningProblem: horizon must be at least 1");
    require(inputs.rows() == horizon && inputs.cols() == s.p(),
            "PlanningProblem: inputs must be horizon x p");
    check_belief(s, root);
  }
};

inline double stage_cost(const SystemModel& sys, const Belief& b, const Vector& u) {
  return b.mean.dot(sys.Q * b.mean) + (sys.Q * b.cov).trace() + u.dot(sys.R * u);
}

inline double terminal_cost(const SystemModel& sys, const Belief& b) {
  return b.mean.dot(sys.QT * b.mean) + (sys.QT * b.cov).trace();
}

inline Belief surrogate_step(const SystemModel& sys, const Belief& b, const Vector& u) {
  check_belief(sys, b);
  CovarianceStep step = propagate_covariance(sys, b.cov, u);
  return {sys.A * b.mean + sys.B * u, std::move(step.next_cov)};
}

// Evaluates the objective at `u` rooted at `root`; fills `grad` (same shape
// as u) when non-null. The forward pass keeps everything the backward pass
// needs, so a call with a gradient costs roughly two objective evaluations.
inline double evaluate_plan(const SystemModel& sys, const Belief& root, const Plan& u,
                            PlanCost cost, Plan* grad) {
  const auto horizon = u.rows();
  const auto p = sys.p();
  require(horizon >= 1 && u.cols() == p, "evaluate_plan: plan must be H x p");
  const bool with_cov = cost == PlanCost::kBelief;

  std::vector<Vector> xs(horizon + 1);
  std::vector<Matrix> covs;
  std::vector<CovarianceStep> steps;
  if (with_cov) {
    covs.resize(horizon + 1);
    steps.resize(horizon);
    covs[0] = root.cov;
  }
  xs[0] = root.mean;

  double total = 0.0;
  for (Eigen::Index t = 0; t < horizon; ++t) {
    const Vector ut = u.row(t).transpose();
    total += xs[t].dot(sys.Q * xs[t]) + ut.dot(sys.R * ut);
    if (with_cov) {
      total += (sys.Q * covs[t]).trace();
      steps[t] = propagate_covariance(sys, covs[t], ut);
      covs[t + 1] = steps[t].next_cov;
    }
    xs[t + 1] = sys.A * xs[t] + sys.B * ut;
  }
  total += xs[horizon].dot(sys.QT * xs[horizon]);
  if (with_cov) total += (sys.QT * covs[horizon]).trace();

  if (grad == nullptr) return total;

  grad->resize(horizon, p);
  const Matrix at = sys.A.transpose();
  Vector lambda = 2.0 * (sys.QT * xs[horizon]);
  Matrix cov_adj;
  if (with_cov) cov_adj = sys.QT;
  for (Eigen::Index t = horizon - 1; t >= 0; --t) {
    const Vector ut = u.row(t).transpose();
    Vector gu = 2.0 * (sys.R * ut) + sys.B.transpose() * lambda;
    if (with_cov) {
      // S' = A S A^T - K C S A^T + Sw with K = A S C^T (C S C^T + Sz)^{-1}.
      const Matrix& c = steps[t].c;
      const Matrix k = -steps[t].gain;
      const Matrix kt_adj = k.transpose() * cov_adj;  // m x n
      const Matrix mid = kt_adj * k;                  // m x m
      const Matrix kt_adj_a = kt_adj * sys.A;
      const Matrix dc = 2.0 * (mid * c - kt_adj_a) * covs[t];
      for (Eigen::Index j = 0; j < p; ++j) gu[j] += dc.cwiseProduct(sys.Cs[j + 1]).sum();
      const Matrix cross = c.transpose() * kt_adj_a;
      Matrix next_adj = sys.Q + at * cov_adj * sys.A - cross - cross.transpose() +
                        c.transpose() * mid * c;
      cov_adj = symmetrize(next_adj);
    }
    grad->row(t) = gu.transpose();
    lambda = 2.0 * (sys.Q * xs[t]) + at * lambda;
  }
  return total;
}

inline double objective(const PlanningProblem& prob) {
  return evaluate_plan(*prob.sys, prob.root, prob.inputs, prob.cost, nullptr);
}

inline Plan gradient(const PlanningProblem& prob) {
  Plan g;
  evaluate_plan(*prob.sys, prob.root, prob.inputs, prob.cost, &g);
  return g;
}

}  // namespace bmpc
