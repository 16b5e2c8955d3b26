#pragma once

// Linear dynamics with bilinear observations:
//
//   x_{t+1} = A x_t + B u_t + w_t,        w_t ~ N(0, Sw)
//   y_t     = (C0 + sum_k u_k Ck) x_t + z_t,  z_t ~ N(0, Sz)
//
// together with the quadratic costs (Q, QT, R) and the initial-state prior.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bmpc/linalg.hpp"
#include "bmpc/rng.hpp"

namespace bmpc {

class SystemModel {
 public:
  Matrix A;
  Matrix B;
  std::vector<Matrix> Cs;  // [C0, C1, ..., Cp]
  Matrix Sw;
  Matrix Sz;
  Matrix Q;
  Matrix QT;
  Matrix R;
  Vector x0_mean;
  Matrix x0_cov;

  SystemModel(Matrix a, Matrix b, std::vector<Matrix> cs, Matrix sw, Matrix sz, Matrix q,
              Matrix qt, Matrix r, Vector x0_mean_in, Matrix x0_cov_in)
      : A(std::move(a)),
        B(std::move(b)),
        Cs(std::move(cs)),
        Sw(std::move(sw)),
        Sz(std::move(sz)),
        Q(std::move(q)),
        QT(std::move(qt)),
        R(std::move(r)),
        x0_mean(std::move(x0_mean_in)),
        x0_cov(std::move(x0_cov_in)) {
    validate();
  }

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index p() const { return B.cols(); }
  Eigen::Index m() const { return Cs.front().rows(); }

  // Copy with C1..Cp zeroed, i.e. the classical LQG special case.
  SystemModel without_bilinear_terms() const {
    SystemModel out = *this;
    for (std::size_t k = 1; k < out.Cs.size(); ++k) out.Cs[k].setZero();
    return out;
  }

 private:
  void validate() const {
    const auto n = A.rows();
    require(n > 0 && A.cols() == n, "SystemModel: A must be square and non-empty");
    require(B.rows() == n && B.cols() > 0, "SystemModel: B must be n x p with p >= 1");
    const auto p = B.cols();
    require(static_cast<Eigen::Index>(Cs.size()) == p + 1,
            "SystemModel: need exactly p+1 observation matrices");
    const auto m = Cs.front().rows();
    require(m > 0, "SystemModel: observation dimension must be positive");
    for (const auto& c : Cs) {
      require(c.rows() == m && c.cols() == n, "SystemModel: every C_k must be m x n");
    }
    require(Sw.rows() == n && Sw.cols() == n, "SystemModel: Sw must be n x n");
    require(Sz.rows() == m && Sz.cols() == m, "SystemModel: Sz must be m x m");
    require(Q.rows() == n && Q.cols() == n, "SystemModel: Q must be n x n");
    require(QT.rows() == n && QT.cols() == n, "SystemModel: QT must be n x n");
    require(R.rows() == p && R.cols() == p, "SystemModel: R must be p x p");
    require(x0_mean.size() == n, "SystemModel: x0 mean must have length n");
    require(x0_cov.rows() == n && x0_cov.cols() == n, "SystemModel: x0 covariance must be n x n");
    require(is_psd(Sw), "SystemModel: Sw must be symmetric PSD");
    require(is_psd(Q), "SystemModel: Q must be symmetric PSD");
    require(is_psd(QT), "SystemModel: QT must be symmetric PSD");
    require(is_psd(x0_cov), "SystemModel: x0 covariance must be symmetric PSD");
    require(is_pd(Sz), "SystemModel: Sz must be symmetric PD");
    require(is_pd(R), "SystemModel: R must be symmetric PD");
  }
};

struct NoiseRealization {
  Vector x0;
  std::vector<Vector> ws;
  std::vector<Vector> zs;

  int steps() const { return static_cast<int>(ws.size()); }
  bool operator==(const NoiseRealization&) const = default;
};

// C(u) = C0 + sum_k u_k C_k.
inline Matrix observation_matrix(const SystemModel& sys, const Vector& u) {
  require(u.size() == sys.p(), "observation_matrix: u must have length p");
  Matrix c = sys.Cs[0];
  for (Eigen::Index k = 0; k < sys.p(); ++k) c.noalias() += u[k] * sys.Cs[k + 1];
  return c;
}

struct StepResult {
  Vector x_next;
  Vector y;
};

// One step of the true system. The output uses the pre-transition state.
inline StepResult simulate_step(const SystemModel& sys, const Vector& x, const Vector& u,
                                const Vector& w, const Vector& z) {
  require(x.size() == sys.n() && w.size() == sys.n(), "simulate_step: state/noise length");
  require(z.size() == sys.m(), "simulate_step: measurement noise length");
  const Matrix c = observation_matrix(sys, u);
  return {sys.A * x + sys.B * u + w, c * x + z};
}

inline Vector sample_gaussian(const Vector& mean, const Matrix& factor, CounterStream& rng) {
  return mean + factor * rng.normal_vector(mean.size());
}

// Draws x0 ~ N(x0_mean, x0_cov) and T i.i.d. process and measurement noise
// vectors. Each quantity has its own stream keyed by (seed, tag).
inline NoiseRealization sample_noise(const SystemModel& sys, int steps, std::uint64_t seed) {
  require(steps >= 1, "sample_noise: need at least one step");
  const Matrix f0 = psd_factor(sys.x0_cov);
  const Matrix fw = psd_factor(sys.Sw);
  const Matrix fz = psd_factor(sys.Sz);
  CounterStream init(seed, StreamTag::kInitState);
  CounterStream process(seed, StreamTag::kProcess);
  CounterStream measurement(seed, StreamTag::kMeasurement);

  NoiseRealization out;
  out.x0 = sample_gaussian(sys.x0_mean, f0, init);
  out.ws.reserve(steps);
  out.zs.reserve(steps);
  const Vector zero_n = Vector::Zero(sys.n());
  const Vector zero_m = Vector::Zero(sys.m());
  for (int t = 0; t < steps; ++t) {
    out.ws.push_back(sample_gaussian(zero_n, fw, process));
    out.zs.push_back(sample_gaussian(zero_m, fz, measurement));
  }
  return out;
}

inline Matrix rescale_spectral_radius(const Matrix& a, double target) {
  require(target > 0.0, "rescale_spectral_radius: target must be positive");
  const double rho = spectral_radius(a);
  if (!(rho > 0.0)) throw NumericError("rescale_spectral_radius: matrix has zero spectral radius");
  return (target / rho) * a;
}

struct SystemParams {
  double rho = 0.95;
  double c0 = 0.01;
  double c1 = 3.0;  // double integrator only
  double h = 0.3;   // double integrator only
  double r_scale = 1.0;
  double sigma_w = 0.1;
  double sigma_z = 0.1;
};

namespace detail {

inline SystemModel assemble(Matrix a, Matrix b, std::vector<Matrix> cs, const SystemParams& prm) {
  const auto n = a.rows();
  const auto p = b.cols();
  const auto m = cs.front().rows();
  return SystemModel(std::move(a), std::move(b), std::move(cs),
                     prm.sigma_w * prm.sigma_w * Matrix::Identity(n, n),
                     prm.sigma_z * prm.sigma_z * Matrix::Identity(m, m), Matrix::Identity(n, n),
                     Matrix::Identity(n, n), prm.r_scale * Matrix::Identity(p, p),
                     Vector::Zero(n), Matrix::Identity(n, n));
}

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev,
                              CounterStream& rng) {
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = stddev * rng.normal();
  return out;
}

}  // namespace detail

// Random benchmark system: A ~ N(0,1) entrywise rescaled to spectral radius
// rho, B ~ N(0, 1/n), C0 ~ N(0, c0^2/m), Ck ~ N(0, 1/m).
inline SystemModel make_random_system(const SystemParams& prm, std::uint64_t seed, int n = 6,
                                      int p = 3, int m = 3) {
  require(prm.rho > 0.0, "make_random_system: rho must be positive");
  require(prm.sigma_w >= 0.0 && prm.sigma_z >= 0.0, "make_random_system: negative noise scale");
  require(prm.r_scale > 0.0, "make_random_system: r_scale must be positive");
  for (std::uint64_t attempt = 0;; ++attempt) {
    CounterStream rng(derive_key(seed, static_cast<std::uint64_t>(StreamTag::kSystem), attempt));
    Matrix a = detail::gaussian_matrix(n, n, 1.0, rng);
    Matrix b = detail::gaussian_matrix(n, p, 1.0 / std::sqrt(double(n)), rng);
    std::vector<Matrix> cs;
    cs.push_back(detail::gaussian_matrix(m, n, prm.c0 / std::sqrt(double(m)), rng));
    for (int k = 0; k < p; ++k) cs.push_back(detail::gaussian_matrix(m, n, 1.0 / std::sqrt(double(m)), rng));
    if (spectral_radius(a) < 1e-12) continue;
    return detail::assemble(rescale_spectral_radius(a, prm.rho), std::move(b), std::move(cs), prm);
  }
}

// Three decoupled double-integrator blocks; input k drives block k and also
// switches on the position sensor of block k with gain c1.
inline SystemModel make_double_integrator(const SystemParams& prm) {
  require(prm.r_scale > 0.0, "make_double_integrator: r_scale must be positive");
  constexpr int kBlocks = 3;
  const int n = 2 * kBlocks;
  Matrix a = Matrix::Zero(n, n);
  Matrix b = Matrix::Zero(n, kBlocks);
  std::vector<Matrix> cs(kBlocks + 1, Matrix::Zero(kBlocks, n));
  for (int i = 0; i < kBlocks; ++i) {
    a(2 * i, 2 * i) = prm.rho;
    a(2 * i + 1, 2 * i + 1) = prm.rho;
    a(2 * i, 2 * i + 1) = prm.h;
    b(2 * i + 1, i) = prm.h;
    cs[0](i, 2 * i) = prm.c0;
    cs[i + 1](i, 2 * i) = prm.c1;
  }
  return detail::assemble(std::move(a), std::move(b), std::move(cs), prm);
}

enum class SystemKind { kRandom, kDoubleIntegrator };

inline std::string to_string(SystemKind k) {
  return k == SystemKind::kRandom ? "random" : "double-integrator";
}

inline SystemModel make_system(SystemKind kind, const SystemParams& prm, std::uint64_t seed) {
  return kind == SystemKind::kRandom ? make_random_system(prm, seed) : make_double_integrator(prm);
}

}  // namespace bmpc
