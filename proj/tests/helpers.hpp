#pragma once

#include <vector>

#include "bmpc/bmpc.hpp"

namespace bmpc::fixtures {

// Scalar system x' = a x + b u + w, y = (c0 + c1 u) x + z.
inline SystemModel scalar_system(double a, double b, double c0, double c1, double sw, double sz,
                                 double q = 1.0, double qt = 1.0, double r = 1.0,
                                 double x0 = 0.0, double s0 = 1.0) {
  auto m1 = [](double v) { return Matrix::Constant(1, 1, v); };
  return SystemModel(m1(a), m1(b), {m1(c0), m1(c1)}, m1(sw), m1(sz), m1(q), m1(qt), m1(r),
                     Vector::Constant(1, x0), m1(s0));
}

inline SystemModel with_prior(SystemModel sys, Vector mean, Matrix cov) {
  return SystemModel(sys.A, sys.B, sys.Cs, sys.Sw, sys.Sz, sys.Q, sys.QT, sys.R, std::move(mean),
                     std::move(cov));
}

inline SystemModel with_noise(SystemModel sys, Matrix sw, Matrix x0_cov) {
  return SystemModel(sys.A, sys.B, sys.Cs, std::move(sw), sys.Sz, sys.Q, sys.QT, sys.R,
                     sys.x0_mean, std::move(x0_cov));
}

inline SystemModel random_benchmark(std::uint64_t seed = 2025) {
  return make_random_system(SystemParams{}, seed);
}

inline SystemModel double_integrator() {
  return make_double_integrator(benchmark_params(SystemKind::kDoubleIntegrator));
}

inline Plan random_plan(int horizon, Eigen::Index p, CounterStream& rng) {
  Plan u(horizon, p);
  for (int t = 0; t < horizon; ++t)
    for (Eigen::Index k = 0; k < p; ++k) u(t, k) = rng.normal();
  return u;
}

inline Matrix random_spd(Eigen::Index n, CounterStream& rng, double ridge = 0.1) {
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.normal();
  return g * g.transpose() / double(n) + ridge * Matrix::Identity(n, n);
}

}  // namespace bmpc::fixtures
