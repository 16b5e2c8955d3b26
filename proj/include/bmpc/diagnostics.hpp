#pragma once

// Quick numerical self-checks behind `belief-mpc validate`.

#include <cmath>
#include <string>
#include <vector>

#include "bmpc/belief_planning.hpp"
#include "bmpc/controllers.hpp"
#include "bmpc/experiments.hpp"

namespace bmpc {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

// Worst per-coordinate relative error of the adjoint gradient against
// central differences, with an absolute floor on the denominator.
inline double gradient_check_error(const SystemModel& sys, const Belief& b, const Plan& u,
                                   double step = 1e-5, double floor = 1e-7) {
  Plan g;
  evaluate_plan(sys, b, u, PlanCost::kBelief, &g);
  double worst = 0.0;
  for (Eigen::Index t = 0; t < u.rows(); ++t) {
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
      Plan up = u, dn = u;
      up(t, k) += step;
      dn(t, k) -= step;
      const double fd = (evaluate_plan(sys, b, up, PlanCost::kBelief, nullptr) -
                         evaluate_plan(sys, b, dn, PlanCost::kBelief, nullptr)) /
                        (2.0 * step);
      const double err = std::abs(fd - g(t, k)) / std::max({std::abs(fd), std::abs(g(t, k)), floor});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

inline std::vector<CheckResult> run_self_checks(const ExperimentConfig& cfg) {
  std::vector<CheckResult> out;
  for (auto kind : cfg.systems_or(kBothSystems)) {
    const SystemModel sys = make_system(kind, cfg.params_for(kind), cfg.seed);
    const std::string tag = to_string(kind) + ": ";
    const int h = cfg.horizon_for(kind);

    out.push_back({tag + "spectral radius matches rho", std::abs(spectral_radius(sys.A) - cfg.params_for(kind).rho),
                   1e-9, false});

    CounterStream rng(derive_key(cfg.seed, hash_string("validate")), StreamTag::kSynthetic);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const Belief b{rng.normal_vector(sys.n()), Matrix::Identity(sys.n(), sys.n())};
      worst = std::max(worst, gradient_check_error(sys, b, random_init(h, sys.p(), rng)));
    }
    out.push_back({tag + "adjoint gradient vs central differences", worst, 1e-4, false});

    Belief b = prior_belief(sys);
    double min_eig = 0.0, asym = 0.0;
    for (int t = 0; t < 2000; ++t) {
      const Vector u = rng.normal_vector(sys.p());
      b = kalman_update(sys, b, u, rng.normal_vector(sys.m()));
      min_eig = std::min(min_eig, min_eigenvalue(b.cov));
      asym = std::max(asym, (b.cov - b.cov.transpose()).cwiseAbs().maxCoeff());
    }
    out.push_back({tag + "filter covariance PSD (negated min eigenvalue)", -min_eig, 1e-9, false});
    out.push_back({tag + "filter covariance asymmetry", asym, 1e-10, false});

    const int steps = 50;
    const RiccatiTable table = riccati_backward(sys, steps);
    double gap = 0.0;
    const Vector x = Vector::Ones(sys.n());
    for (int t = 0; t < steps; ++t) {
      gap = std::max(gap, (sep_mpc_action(sys, {x, b.cov}, steps - t) - sep_action(table, t, x))
                              .cwiseAbs()
                              .maxCoeff());
    }
    out.push_back({tag + "Sep-MPC(H = T - t) equals Sep(t)", gap, 0.0, false});
  }
  for (auto& c : out) c.passed = c.value <= c.threshold;
  return out;
}

}  // namespace bmpc
