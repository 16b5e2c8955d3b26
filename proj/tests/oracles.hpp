#pragma once

// Independent reference computations used only by the test suites. None of
// these go through the library's recursion code paths.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

#include "bmpc/system_model.hpp"

namespace bmpc::oracle {

// Entry-by-entry C0 + sum_k u_k Ck with explicit loops.
inline Matrix observation_matrix_loops(const SystemModel& sys, const Vector& u) {
  Matrix c(sys.m(), sys.n());
  for (Eigen::Index i = 0; i < sys.m(); ++i) {
    for (Eigen::Index j = 0; j < sys.n(); ++j) {
      double v = sys.Cs[0](i, j);
      for (Eigen::Index k = 0; k < sys.p(); ++k) v += u[k] * sys.Cs[k + 1](i, j);
      c(i, j) = v;
    }
  }
  return c;
}

// Textbook Kalman filter: measurement update in Joseph form with an explicit
// inverse, then time update.
struct TextbookKf {
  Vector mean;
  Matrix cov;

  void step(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& sw,
            const Matrix& sz, const Vector& u, const Vector& y) {
    const auto n = a.rows();
    const Matrix s = c * cov * c.transpose() + sz;
    const Matrix k = cov * c.transpose() * s.inverse();
    const Vector filtered_mean = mean + k * (y - c * mean);
    const Matrix ikc = Matrix::Identity(n, n) - k * c;
    const Matrix filtered_cov = ikc * cov * ikc.transpose() + k * sz * k.transpose();
    mean = a * filtered_mean + b * u;
    cov = a * filtered_cov * a.transpose() + sw;
  }
};

// Spectral radius from ||A^(2^j)||^(1/2^j) with renormalized repeated
// squaring (a power method on the matrix itself).
inline double spectral_radius_power(const Matrix& a, int squarings = 60) {
  Matrix m = a;
  double log_scale = 0.0;  // A^(2^j) = exp(log_scale) * m
  double norm = m.norm();
  m /= norm;
  log_scale = std::log(norm);
  for (int j = 1; j <= squarings; ++j) {
    m = m * m;
    norm = m.norm();
    m /= norm;
    log_scale = 2.0 * log_scale + std::log(norm);
  }
  return std::exp(log_scale / std::ldexp(1.0, squarings));
}

// Batch (lifted) form of the deterministic LQ problem over H steps:
// X = Phi x0 + Gamma U with X = (x_1..x_H), U = (u_0..u_{H-1}).
struct BatchLq {
  Matrix phi, gamma, qbar, rbar;
  double root_cost = 0.0;  // x0^T Q x0

  BatchLq(const SystemModel& sys, const Vector& x0, int horizon) {
    const auto n = sys.n(), p = sys.p();
    phi = Matrix::Zero(n * horizon, n);
    gamma = Matrix::Zero(n * horizon, p * horizon);
    qbar = Matrix::Zero(n * horizon, n * horizon);
    rbar = Matrix::Zero(p * horizon, p * horizon);
    Matrix apow = Matrix::Identity(n, n);
    for (int i = 0; i < horizon; ++i) {
      apow = sys.A * apow;
      phi.block(n * i, 0, n, n) = apow;
      for (int j = 0; j <= i; ++j) {
        Matrix blk = sys.B;
        for (int r = 0; r < i - j; ++r) blk = sys.A * blk;
        gamma.block(n * i, p * j, n, p) = blk;
      }
      qbar.block(n * i, n * i, n, n) = i + 1 == horizon ? sys.QT : sys.Q;
      rbar.block(p * i, p * i, p, p) = sys.R;
    }
    root_cost = x0.dot(sys.Q * x0);
    x0_ = x0;
  }

  double cost(const Vector& u) const {
    const Vector x = phi * x0_ + gamma * u;
    return root_cost + x.dot(qbar * x) + u.dot(rbar * u);
  }
  Vector gradient(const Vector& u) const {
    const Matrix h = gamma.transpose() * qbar * gamma + rbar;
    const Vector g = gamma.transpose() * qbar * phi * x0_;
    return 2.0 * (h * u + g);
  }
  Vector minimizer() const {
    const Matrix h = gamma.transpose() * qbar * gamma + rbar;
    const Vector g = gamma.transpose() * qbar * phi * x0_;
    return -h.ldlt().solve(g);
  }

 private:
  Vector x0_;
};

inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                                 double step) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector up = x, dn = x;
    up[i] += step;
    dn[i] -= step;
    g[i] = (f(up) - f(dn)) / (2.0 * step);
  }
  return g;
}

}  // namespace bmpc::oracle
