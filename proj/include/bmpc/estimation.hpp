#pragma once

// Input-dependent Kalman filter in one-step prediction form. The belief at
// time t is (x_{t|t-1}, S_{t|t-1}); the gain carries a leading minus sign:
//
//   L(u)      = -A S C(u)^T (C(u) S C(u)^T + Sz)^{-1}
//   x_{t+1|t} = A x + B u - L(u) (y - C(u) x)
//   S_{t+1|t} = A S A^T + L(u) C(u) S A^T + Sw

#include "bmpc/linalg.hpp"
#include "bmpc/system_model.hpp"

namespace bmpc {

struct Belief {
  Vector mean;
  Matrix cov;

  bool operator==(const Belief&) const = default;
};

inline Belief prior_belief(const SystemModel& sys) { return {sys.x0_mean, sys.x0_cov}; }

inline void check_belief(const SystemModel& sys, const Belief& b) {
  require(b.mean.size() == sys.n(), "belief mean must have length n");
  require(b.cov.rows() == sys.n() && b.cov.cols() == sys.n(), "belief covariance must be n x n");
}

// Gain for an already-formed observation matrix.
inline Matrix kalman_gain_for(const SystemModel& sys, const Matrix& cov, const Matrix& c) {
  const Matrix cross = sys.A * cov * c.transpose();  // n x m
  Matrix innovation = c * cov * c.transpose() + sys.Sz;
  innovation = symmetrize(innovation);
  try {
    return -spd_solve(innovation, cross.transpose()).transpose();
  } catch (const NumericError& e) {
    throw NumericError(std::string("innovation covariance: ") + e.what());
  }
}

inline Matrix kalman_gain(const SystemModel& sys, const Matrix& cov, const Vector& u) {
  require(cov.rows() == sys.n() && cov.cols() == sys.n(), "kalman_gain: covariance must be n x n");
  return kalman_gain_for(sys, cov, observation_matrix(sys, u));
}

struct CovarianceStep {
  Matrix c;         // C(u)
  Matrix gain;      // L(u)
  Matrix next_cov;  // symmetrized
};

// Covariance half of the recursion. The filter and the planning surrogate
// both go through here so their covariances agree bit for bit.
inline CovarianceStep propagate_covariance(const SystemModel& sys, const Matrix& cov,
                                           const Vector& u) {
  CovarianceStep out;
  out.c = observation_matrix(sys, u);
  out.gain = kalman_gain_for(sys, cov, out.c);
  const Matrix cov_at = cov * sys.A.transpose();
  Matrix next = sys.A * cov_at + out.gain * (out.c * cov_at) + sys.Sw;
  out.next_cov = symmetrize(next);
  return out;
}

inline Belief kalman_update(const SystemModel& sys, const Belief& b, const Vector& u,
                            const Vector& y) {
  check_belief(sys, b);
  require(y.size() == sys.m(), "kalman_update: y must have length m");
  CovarianceStep step = propagate_covariance(sys, b.cov, u);
  Vector innovation = y - step.c * b.mean;
  Vector mean = sys.A * b.mean + sys.B * u - step.gain * innovation;
  return {std::move(mean), std::move(step.next_cov)};
}

}  // namespace bmpc
