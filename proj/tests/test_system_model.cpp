#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace bmpc;
using bmpc::fixtures::scalar_system;

TEST(ObservationMatrix, ZeroInputGivesC0) {
  const auto sys = fixtures::random_benchmark();
  EXPECT_EQ(observation_matrix(sys, Vector::Zero(3)), sys.Cs[0]);
}

TEST(ObservationMatrix, DirectCombination) {
  const auto m1 = [](double a, double b) {
    Matrix r(1, 2);
    r << a, b;
    return r;
  };
  SystemModel sys(Matrix::Identity(2, 2), Matrix::Ones(2, 1), {m1(1, 0), m1(0, 2)},
                  Matrix::Identity(2, 2), Matrix::Identity(1, 1), Matrix::Identity(2, 2),
                  Matrix::Identity(2, 2), Matrix::Identity(1, 1), Vector::Zero(2),
                  Matrix::Identity(2, 2));
  EXPECT_EQ(observation_matrix(sys, Vector::Constant(1, 0.5)), m1(1, 1));
}

TEST(ObservationMatrix, UnitInputsMatchLoopOracle) {
  const auto sys = fixtures::random_benchmark(7);
  for (int k = 0; k < 3; ++k) {
    const Vector e = Vector::Unit(3, k);
    const Matrix got = observation_matrix(sys, e);
    EXPECT_LE((got - oracle::observation_matrix_loops(sys, e)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((got - (sys.Cs[0] + sys.Cs[k + 1])).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(ObservationMatrix, LinearInInput) {
  const auto sys = fixtures::random_benchmark(3);
  CounterStream rng(11, StreamTag::kSynthetic);
  for (int i = 0; i < 100; ++i) {
    const Vector u = rng.normal_vector(3), v = rng.normal_vector(3);
    const Matrix d = observation_matrix(sys, u + v) - observation_matrix(sys, u) -
                     observation_matrix(sys, v) + observation_matrix(sys, Vector::Zero(3));
    EXPECT_LE(d.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((observation_matrix(sys, u) - oracle::observation_matrix_loops(sys, u))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-14);
  }
}

TEST(SimulateStep, ScalarHandArithmetic) {
  const auto sys = scalar_system(1, 1, 1, 0, 1, 1);
  const auto r = simulate_step(sys, Vector::Constant(1, 2), Vector::Constant(1, 3),
                               Vector::Constant(1, 0.1), Vector::Constant(1, -0.2));
  EXPECT_NEAR(r.x_next[0], 5.1, 1e-15);
  EXPECT_NEAR(r.y[0], 1.8, 1e-15);
}

TEST(SimulateStep, NoiselessAndPureNoise) {
  const auto sys = fixtures::random_benchmark();
  CounterStream rng(5, StreamTag::kSynthetic);
  const Vector x = rng.normal_vector(6), w = rng.normal_vector(6), z = rng.normal_vector(3);
  const auto quiet = simulate_step(sys, x, Vector::Zero(3), Vector::Zero(6), Vector::Zero(3));
  EXPECT_EQ(quiet.x_next, Vector(sys.A * x));
  EXPECT_EQ(quiet.y, Vector(sys.Cs[0] * x));
  const auto noise = simulate_step(sys, Vector::Zero(6), Vector::Zero(3), w, z);
  EXPECT_EQ(noise.x_next, w);
  EXPECT_EQ(noise.y, z);
}

TEST(SimulateStep, MatchesAffineMap) {
  const auto sys = fixtures::double_integrator();
  CounterStream rng(9, StreamTag::kSynthetic);
  const Vector x = rng.normal_vector(6), u = rng.normal_vector(3);
  const auto a = simulate_step(sys, x, u, Vector::Zero(6), Vector::Zero(3));
  const auto b = simulate_step(sys, x, u, Vector::Zero(6), Vector::Zero(3));
  EXPECT_EQ(a.x_next, b.x_next);
  EXPECT_LE((a.x_next - (sys.A * x + sys.B * u)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((a.y - oracle::observation_matrix_loops(sys, u) * x).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SampleNoise, DegenerateCovariances) {
  auto sys = fixtures::random_benchmark();
  sys = fixtures::with_prior(fixtures::with_noise(sys, Matrix::Zero(6, 6), Matrix::Zero(6, 6)),
                            Vector::Constant(6, 0.25), Matrix::Zero(6, 6));
  const auto noise = sample_noise(sys, 20, 1);
  EXPECT_EQ(noise.x0, Vector::Constant(6, 0.25));
  for (const auto& w : noise.ws) EXPECT_TRUE(w.isZero(0.0));
}

TEST(SampleNoise, SameSeedIdenticalDifferentSeedDiffers) {
  const auto sys = fixtures::random_benchmark();
  const auto a = sample_noise(sys, 50, 42), b = sample_noise(sys, 50, 42),
             c = sample_noise(sys, 50, 43);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
  EXPECT_EQ(a.steps(), 50);
  EXPECT_EQ(a.zs.size(), 50u);
}

TEST(SampleNoise, ProcessCovarianceMonteCarlo) {
  CounterStream rng(3, StreamTag::kSynthetic);
  const Matrix sw = fixtures::random_spd(6, rng);
  auto sys = fixtures::with_noise(fixtures::random_benchmark(), sw, Matrix::Identity(6, 6));
  const auto noise = sample_noise(sys, 100000, 77);
  Matrix acc = Matrix::Zero(6, 6);
  for (const auto& w : noise.ws) acc += w * w.transpose();
  acc /= double(noise.ws.size());
  EXPECT_LE((acc - sw).norm() / sw.norm(), 0.05);
}

TEST(SampleNoise, StreamsDoNotShareState) {
  // Process and measurement draws come from distinct keyed streams.
  const auto sys = fixtures::random_benchmark();
  const auto a = sample_noise(sys, 10, 5);
  const auto b = sample_noise(sys, 20, 5);
  for (int t = 0; t < 10; ++t) {
    EXPECT_EQ(a.ws[t], b.ws[t]);
    EXPECT_EQ(a.zs[t], b.zs[t]);
  }
}

TEST(RandomSystem, SpectralRadiusAndScaling) {
  for (std::uint64_t seed : {1ull, 2025ull, 99ull}) {
    const auto sys = make_random_system(SystemParams{}, seed);
    EXPECT_LT(std::abs(spectral_radius(sys.A) - 0.95), 1e-9);
    EXPECT_EQ(sys.R, Matrix::Identity(3, 3));
    EXPECT_EQ(sys.n(), 6);
    EXPECT_EQ(sys.p(), 3);
    EXPECT_EQ(sys.m(), 3);
  }
  SystemParams prm;
  prm.r_scale = 10;
  EXPECT_EQ(make_random_system(prm, 1).R, 10.0 * Matrix::Identity(3, 3));
}

TEST(RandomSystem, C0EntryVarianceMonteCarlo) {
  SystemParams prm;
  prm.c0 = 0.5;
  double sum = 0.0, sum2 = 0.0;
  long count = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto sys = make_random_system(prm, s);
    for (Eigen::Index i = 0; i < sys.Cs[0].size(); ++i) {
      const double v = sys.Cs[0](i);
      sum += v;
      sum2 += v * v;
      ++count;
    }
  }
  const double mean = sum / count;
  const double var = sum2 / count - mean * mean;
  const double expected = prm.c0 * prm.c0 / 3.0;
  EXPECT_LE(std::abs(var - expected) / expected, 0.05);
}

TEST(DoubleIntegrator, Entries) {
  const auto sys = fixtures::double_integrator();
  for (int i = 0; i < 6; ++i) EXPECT_EQ(sys.A(i, i), 0.95);
  EXPECT_EQ(sys.A(0, 1), 0.3);
  EXPECT_EQ(sys.B(1, 0), 0.3);
  EXPECT_EQ((sys.Cs[0].array() != 0).count(), 3);
  EXPECT_EQ(sys.Cs[0](0, 0), 0.01);
  EXPECT_EQ(sys.Cs[0](1, 2), 0.01);
  EXPECT_EQ(sys.Cs[0](2, 4), 0.01);
  EXPECT_EQ((sys.Cs[2].array() != 0).count(), 1);
  EXPECT_EQ(sys.Cs[2](1, 2), 3.0);
  EXPECT_EQ(sys.Sz, Matrix::Identity(3, 3));
  for (int i = 1; i < 3; ++i) {
    EXPECT_EQ(sys.A.block(2 * i, 2 * i, 2, 2), sys.A.block(0, 0, 2, 2));
  }
}

TEST(RescaleSpectralRadius, DiagonalCase) {
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 2.0, 0.5;
  Matrix expected = Matrix::Zero(2, 2);
  expected.diagonal() << 1.0, 0.25;
  EXPECT_LE((rescale_spectral_radius(a, 1.0) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RescaleSpectralRadius, FixedPointIdempotentAndPowerOracle) {
  CounterStream rng(21, StreamTag::kSynthetic);
  for (int i = 0; i < 20; ++i) {
    const Matrix a = fixtures::random_plan(6, 6, rng);
    const Matrix once = rescale_spectral_radius(a, 1.1);
    EXPECT_LT(std::abs(oracle::spectral_radius_power(once) - 1.1), 1e-9);
    EXPECT_LE((rescale_spectral_radius(once, 1.1) - once).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((rescale_spectral_radius(a, spectral_radius(a)) - a).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(rescale_spectral_radius(Matrix::Zero(3, 3), 1.0), NumericError);
}

TEST(SystemModelValidation, RejectsInconsistentInputs) {
  const auto m = [](int r, int c) { return Matrix::Identity(r, c); };
  EXPECT_THROW(SystemModel(m(2, 3), m(2, 1), {m(1, 2), m(1, 2)}, m(2, 2), m(1, 1), m(2, 2), m(2, 2),
                           m(1, 1), Vector::Zero(2), m(2, 2)),
               InputError);
  EXPECT_THROW(SystemModel(m(2, 2), m(2, 1), {m(1, 2)}, m(2, 2), m(1, 1), m(2, 2), m(2, 2),
                           m(1, 1), Vector::Zero(2), m(2, 2)),
               InputError);
  EXPECT_THROW(SystemModel(m(2, 2), m(2, 1), {m(1, 2), m(1, 2)}, -m(2, 2), m(1, 1), m(2, 2),
                           m(2, 2), m(1, 1), Vector::Zero(2), m(2, 2)),
               InputError);
  EXPECT_THROW(SystemModel(m(2, 2), m(2, 1), {m(1, 2), m(1, 2)}, m(2, 2), Matrix::Zero(1, 1),
                           m(2, 2), m(2, 2), m(1, 1), Vector::Zero(2), m(2, 2)),
               InputError);
}

TEST(CounterStream, KeyedAndReproducible) {
  CounterStream a(1, StreamTag::kProcess), b(1, StreamTag::kProcess), c(1, StreamTag::kMeasurement);
  const Vector va = a.normal_vector(8);
  EXPECT_EQ(va, b.normal_vector(8));
  EXPECT_NE(va, c.normal_vector(8));
  EXPECT_NE(derive_key(1, 2, 3), derive_key(1, 3, 2));
  EXPECT_EQ(hash_string("h-sweep"), hash_string("h-sweep"));
}
