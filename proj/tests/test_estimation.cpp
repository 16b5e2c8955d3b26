#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace bmpc;
using bmpc::fixtures::scalar_system;

namespace {

SystemModel without_bilinear(std::uint64_t seed) {
  return make_random_system(SystemParams{}, seed).without_bilinear_terms();
}

}  // namespace

TEST(KalmanGain, ScalarBayes) {
  const auto sys = scalar_system(1, 1, 1, 0, 0.1, 1);
  EXPECT_NEAR(kalman_gain(sys, Matrix::Identity(1, 1), Vector::Zero(1))(0, 0), -0.5, 1e-15);
}

TEST(KalmanGain, VanishesWithoutCovarianceOrObservation) {
  const auto sys = fixtures::random_benchmark();
  EXPECT_TRUE(kalman_gain(sys, Matrix::Zero(6, 6), Vector::Ones(3)).isZero(0.0));
  SystemParams prm = benchmark_params(SystemKind::kDoubleIntegrator);
  prm.c0 = 0.0;
  const auto di = make_double_integrator(prm);
  EXPECT_TRUE(kalman_gain(di, Matrix::Identity(6, 6), Vector::Zero(3)).isZero(0.0));
}

TEST(KalmanUpdate, ScalarBayes) {
  const auto sys = scalar_system(1, 1, 1, 0, 0.1, 1);
  const Belief next = kalman_update(sys, {Vector::Zero(1), Matrix::Identity(1, 1)},
                                    Vector::Zero(1), Vector::Ones(1));
  EXPECT_NEAR(next.mean[0], 0.5, 1e-15);
  EXPECT_NEAR(next.cov(0, 0), 0.6, 1e-15);
}

TEST(KalmanUpdate, NoInformationIsOpenLoop) {
  SystemParams prm = benchmark_params(SystemKind::kDoubleIntegrator);
  prm.c0 = 0.0;
  const auto sys = make_double_integrator(prm);
  CounterStream rng(4, StreamTag::kSynthetic);
  Belief b{rng.normal_vector(6), fixtures::random_spd(6, rng)};
  const Vector u = Vector::Zero(3);
  for (int t = 0; t < 50; ++t) {
    const Belief next = kalman_update(sys, b, u, rng.normal_vector(3));
    EXPECT_EQ(next.mean, Vector(sys.A * b.mean + sys.B * u));
    EXPECT_EQ(next.cov, symmetrize(Matrix(sys.A * Matrix(b.cov * sys.A.transpose()) + sys.Sw)));
    b = next;
  }
}

TEST(KalmanUpdate, MatchesTextbookFilterFixedObservation) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sys = without_bilinear(seed);
    const auto noise = sample_noise(sys, 100, seed + 1000);
    CounterStream urng(seed, StreamTag::kSynthetic);
    Belief b = prior_belief(sys);
    oracle::TextbookKf kf{b.mean, b.cov};
    Vector x = noise.x0;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Vector u = urng.normal_vector(3);
      const auto step = simulate_step(sys, x, u, noise.ws[t], noise.zs[t]);
      b = kalman_update(sys, b, u, step.y);
      kf.step(sys.A, sys.B, sys.Cs[0], sys.Sw, sys.Sz, u, step.y);
      worst = std::max({worst, (b.mean - kf.mean).cwiseAbs().maxCoeff(),
                        (b.cov - kf.cov).cwiseAbs().maxCoeff()});
      x = step.x_next;
    }
    EXPECT_LE(worst, 1e-10) << "seed " << seed;
  }
}

TEST(KalmanUpdate, MatchesTextbookFilterWithInputDependentObservation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto sys = make_random_system(SystemParams{}, seed);
    const auto noise = sample_noise(sys, 100, seed + 77);
    CounterStream urng(seed, StreamTag::kSynthetic);
    Belief b = prior_belief(sys);
    oracle::TextbookKf kf{b.mean, b.cov};
    Vector x = noise.x0;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Vector u = urng.normal_vector(3);
      const auto step = simulate_step(sys, x, u, noise.ws[t], noise.zs[t]);
      b = kalman_update(sys, b, u, step.y);
      kf.step(sys.A, sys.B, oracle::observation_matrix_loops(sys, u), sys.Sw, sys.Sz, u, step.y);
      worst = std::max({worst, (b.mean - kf.mean).cwiseAbs().maxCoeff(),
                        (b.cov - kf.cov).cwiseAbs().maxCoeff()});
      x = step.x_next;
    }
    EXPECT_LE(worst, 1e-9) << "seed " << seed;
  }
}

TEST(KalmanUpdate, CovarianceIndependentOfObservations) {
  const auto sys = fixtures::double_integrator();
  CounterStream urng(1, StreamTag::kSynthetic), ya(2, StreamTag::kSynthetic),
      yb(3, StreamTag::kSynthetic);
  Belief a = prior_belief(sys), b = prior_belief(sys);
  for (int t = 0; t < 200; ++t) {
    const Vector u = urng.normal_vector(3);
    a = kalman_update(sys, a, u, ya.normal_vector(3));
    b = kalman_update(sys, b, u, 10.0 * yb.normal_vector(3));
    ASSERT_EQ(a.cov, b.cov);
  }
}

TEST(KalmanUpdate, LongRolloutStaysSymmetricPsd) {
  for (const auto& sys : {fixtures::random_benchmark(), fixtures::double_integrator()}) {
    CounterStream rng(8, StreamTag::kSynthetic);
    Belief b = prior_belief(sys);
    double min_eig = 0.0;
    for (int t = 0; t < 10000; ++t) {
      b = kalman_update(sys, b, 3.0 * rng.normal_vector(3), rng.normal_vector(3));
      ASSERT_EQ(b.cov, Matrix(b.cov.transpose()));
      if (t % 10 == 0) min_eig = std::min(min_eig, min_eigenvalue(b.cov));
    }
    EXPECT_GE(min_eig, -1e-9);
  }
}

TEST(KalmanUpdate, RejectsMalformedBelief) {
  const auto sys = fixtures::random_benchmark();
  EXPECT_THROW(kalman_update(sys, {Vector::Zero(5), Matrix::Identity(6, 6)}, Vector::Zero(3),
                             Vector::Zero(3)),
               InputError);
  EXPECT_THROW(kalman_update(sys, prior_belief(sys), Vector::Zero(3), Vector::Zero(2)),
               InputError);
}
