#pragma once

// Small dense linear-algebra helpers shared by every module. All matrices
// here are at most a handful of rows, so nothing is tuned for size.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace bmpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// H x p input plan, one row per time step.
using Plan = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Thrown when a numerical precondition fails (non-PD innovation covariance,
// covariance that is not PSD within tolerance, unscalable matrix, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown on inconsistent dimensions or out-of-range arguments.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InputError(what);
}

inline Matrix symmetrize(const Matrix& s) { return 0.5 * (s + s.transpose()); }

inline double min_eigenvalue(const Matrix& s) {
  if (s.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(s), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

inline bool is_symmetric(const Matrix& s, double tol = 1e-10) {
  return s.rows() == s.cols() && (s - s.transpose()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_psd(const Matrix& s, double tol = 1e-9) {
  return is_symmetric(s, 1e-8 * std::max(1.0, s.cwiseAbs().maxCoeff())) &&
         min_eigenvalue(s) >= -tol;
}

inline bool is_pd(const Matrix& s) {
  if (!is_symmetric(s, 1e-8 * std::max(1.0, s.cwiseAbs().maxCoeff()))) return false;
  Eigen::LLT<Matrix> llt(s);
  return llt.info() == Eigen::Success;
}

// Spectral radius from the full eigendecomposition.
inline double spectral_radius(const Matrix& a) {
  require(a.rows() == a.cols(), "spectral_radius: matrix must be square");
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> eig(a, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

// Solves S X = rhs for symmetric PD S. Falls back to an eigenvalue-clamped
// pseudo-solve when the Cholesky factorization fails but S is PSD within
// 1e-10; anything more indefinite is a numeric error.
inline Matrix spd_solve(const Matrix& s, const Matrix& rhs) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(s));
  const Vector& lam = eig.eigenvalues();
  if (lam.minCoeff() < -1e-10) {
    throw NumericError("matrix is not positive definite (min eigenvalue " +
                       std::to_string(lam.minCoeff()) + ")");
  }
  const double cutoff = 1e-14 * std::max(1.0, lam.maxCoeff());
  Vector inv = lam.unaryExpr([cutoff](double v) { return v > cutoff ? 1.0 / v : 0.0; });
  const Matrix& v = eig.eigenvectors();
  return v * inv.asDiagonal() * (v.transpose() * rhs);
}

// Returns F with F F^T = S for a PSD S. Uses Cholesky when it succeeds, else
// an eigendecomposition with eigenvalues in [-1e-10, 0) clamped to zero.
inline Matrix psd_factor(const Matrix& s) {
  require(s.rows() == s.cols(), "psd_factor: matrix must be square");
  if (s.size() == 0) return s;
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(s));
  const Vector& lam = eig.eigenvalues();
  if (lam.minCoeff() < -1e-10) {
    throw NumericError("covariance is not PSD within tolerance (min eigenvalue " +
                       std::to_string(lam.minCoeff()) + ")");
  }
  Vector root = lam.unaryExpr([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
  return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace bmpc
