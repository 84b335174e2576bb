#pragma once

// Gaussian-state calculus in shot-noise units (vacuum covariance = identity),
// quadrature ordering (x1, p1, x2, p2, ...).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rqc/error.hpp"

namespace rqc::gaussian {

using Matrix = Eigen::MatrixXd;

/// Symplectic form for n modes.
inline Matrix omega(std::size_t modes) {
  Matrix w = Matrix::Zero(2 * modes, 2 * modes);
  for (std::size_t k = 0; k < modes; ++k) {
    const auto i = static_cast<Eigen::Index>(2 * k);
    w(i, i + 1) = 1.0;
    w(i + 1, i) = -1.0;
  }
  return w;
}

class CovarianceMatrix {
public:
  explicit CovarianceMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() % 2 != 0 || m_.rows() == 0)
      throw DomainError("covariance matrix must be 2n x 2n");
    if (!m_.isApprox(m_.transpose(), 1e-12))
      throw DomainError("covariance matrix must be symmetric");
    m_ = 0.5 * (m_ + m_.transpose()).eval();
  }

  static CovarianceMatrix vacuum(std::size_t modes) {
    const auto d = static_cast<Eigen::Index>(2 * modes);
    return CovarianceMatrix(Matrix::Identity(d, d));
  }
  static CovarianceMatrix thermal(double v) {
    if (!(v >= 1.0))
      throw DomainError("thermal variance must be >= 1");
    return CovarianceMatrix(v * Matrix::Identity(2, 2));
  }

  [[nodiscard]] std::size_t modes() const noexcept {
    return static_cast<std::size_t>(m_.rows() / 2);
  }
  [[nodiscard]] const Matrix &matrix() const noexcept { return m_; }
  [[nodiscard]] double operator()(Eigen::Index i, Eigen::Index j) const {
    return m_(i, j);
  }

  /// 2x2 block for modes (i, j).
  [[nodiscard]] Matrix block(std::size_t i, std::size_t j) const {
    return m_.block(static_cast<Eigen::Index>(2 * i),
                    static_cast<Eigen::Index>(2 * j), 2, 2);
  }

  /// Reduced state of the listed modes.
  [[nodiscard]] CovarianceMatrix reduced(const std::vector<std::size_t> &keep) const {
    const auto d = static_cast<Eigen::Index>(2 * keep.size());
    Matrix r(d, d);
    for (std::size_t a = 0; a < keep.size(); ++a)
      for (std::size_t b = 0; b < keep.size(); ++b)
        r.block(static_cast<Eigen::Index>(2 * a), static_cast<Eigen::Index>(2 * b),
                2, 2) = block(keep[a], keep[b]);
    return CovarianceMatrix(r);
  }

private:
  Matrix m_;
};

/// Two-mode squeezed vacuum with local variance V.
inline CovarianceMatrix tmsv(double V) {
  if (!(V >= 1.0))
    throw DomainError("TMSV variance must be >= 1");
  const double c = std::sqrt(std::max(0.0, V * V - 1.0));
  Matrix m = Matrix::Zero(4, 4);
  m.diagonal().setConstant(V);
  m(0, 2) = m(2, 0) = c;
  m(1, 3) = m(3, 1) = -c;
  return CovarianceMatrix(m);
}

/// Phase-insensitive amplifier (gain G, vacuum idler) then loss eta on one
/// mode: v -> eta (G v + G - 1) + 1 - eta, cross terms scaled by sqrt(eta G).
inline CovarianceMatrix apply_channel(const CovarianceMatrix &cm,
                                      std::size_t mode, double G, double eta) {
  if (!(G >= 1.0))
    throw DomainError("amplifier gain must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0))
    throw DomainError("efficiency eta must lie in (0, 1]");
  if (mode >= cm.modes())
    throw DomainError("mode index out of range");
  const auto n = static_cast<Eigen::Index>(2 * cm.modes());
  Matrix X = Matrix::Identity(n, n);
  Matrix Y = Matrix::Zero(n, n);
  const auto i = static_cast<Eigen::Index>(2 * mode);
  const double scale = std::sqrt(eta * G);
  X(i, i) = X(i + 1, i + 1) = scale;
  Y(i, i) = Y(i + 1, i + 1) = eta * (G - 1.0) + (1.0 - eta);
  return CovarianceMatrix(X * cm.matrix() * X.transpose() + Y);
}

/// Symplectic spectrum, descending. Computed from the Hermitian matrix
/// i S^{1/2} Omega S^{1/2}, whose eigenvalues are +-nu_k.
inline std::vector<double> symplectic_eigenvalues(const CovarianceMatrix &cm) {
  const Matrix &s = cm.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw DomainError("covariance matrix is not positive definite");
  const Matrix root = es.operatorSqrt();
  const Matrix a = root * omega(cm.modes()) * root;
  const Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * a.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h);
  std::vector<double> nu;
  for (Eigen::Index k = 0; k < hs.eigenvalues().size(); ++k)
    if (hs.eigenvalues()(k) > 0.0)
      nu.push_back(hs.eigenvalues()(k));
  if (nu.size() != cm.modes())
    throw DomainError("symplectic spectrum did not pair up");
  std::sort(nu.begin(), nu.end(), std::greater<>());
  return nu;
}

inline bool is_physical(const CovarianceMatrix &cm, double tol = 1e-9) {
  try {
    const auto nu = symplectic_eigenvalues(cm);
    return nu.back() >= 1.0 - tol;
  } catch (const DomainError &) {
    return false;
  }
}

/// g(x) = (x+1) log2(x+1) - x log2 x, with g(0) = 0.
inline double entropy_g(double x) {
  if (x <= 0.0)
    return 0.0;
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

/// von Neumann entropy in bits. A symplectic eigenvalue below 1 by more than
/// tol (widened by the rounding floor eps * condition number of the matrix) is
/// reported as unphysical; eigenvalues within the floor of 1 count as 1.
inline double entropy(const CovarianceMatrix &cm, double tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(cm.matrix(), Eigen::EigenvaluesOnly);
  const double cond = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * cond;
  double s = 0.0;
  for (double nu : symplectic_eigenvalues(cm)) {
    if (nu < 1.0 - std::max(tol, floor))
      throw DomainError("unphysical covariance matrix: symplectic eigenvalue " +
                        std::to_string(nu));
    // Within the rounding floor nu is indistinguishable from 1.
    if (nu - 1.0 > floor)
      s += entropy_g(0.5 * (nu - 1.0));
  }
  return s;
}

/// State of the other modes after homodyne detection of the x quadrature of
/// `mode`: A - C (Pi B Pi)^+ C^T with a rank-thresholded pseudo-inverse.
inline CovarianceMatrix homodyne_condition(const CovarianceMatrix &cm,
                                           std::size_t mode,
                                           double rank_tol = 1e-10) {
  if (mode >= cm.modes() || cm.modes() < 2)
    throw DomainError("homodyne_condition needs another mode to condition");
  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < cm.modes(); ++k)
    if (k != mode)
      rest.push_back(k);
  const Matrix A = cm.reduced(rest).matrix();
  const auto na = A.rows();
  Matrix C(na, 2);
  for (std::size_t r = 0; r < rest.size(); ++r)
    C.block(static_cast<Eigen::Index>(2 * r), 0, 2, 2) = cm.block(rest[r], mode);
  Matrix PBP = cm.block(mode, mode);
  PBP(0, 1) = PBP(1, 0) = PBP(1, 1) = 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(PBP);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  Matrix pinv = Matrix::Zero(2, 2);
  for (Eigen::Index k = 0; k < 2; ++k) {
    const double lam = es.eigenvalues()(k);
    if (std::abs(lam) > rank_tol * top)
      pinv += (1.0 / lam) * es.eigenvectors().col(k) *
              es.eigenvectors().col(k).transpose();
  }
  return CovarianceMatrix(A - C * pinv * C.transpose());
}

/// State of the other modes after heterodyne detection of `mode`:
/// A - C (B + I)^{-1} C^T.
inline CovarianceMatrix heterodyne_condition(const CovarianceMatrix &cm,
                                             std::size_t mode) {
  if (mode >= cm.modes() || cm.modes() < 2)
    throw DomainError("heterodyne_condition needs another mode to condition");
  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < cm.modes(); ++k)
    if (k != mode)
      rest.push_back(k);
  const Matrix A = cm.reduced(rest).matrix();
  Matrix C(A.rows(), 2);
  for (std::size_t r = 0; r < rest.size(); ++r)
    C.block(static_cast<Eigen::Index>(2 * r), 0, 2, 2) = cm.block(rest[r], mode);
  const Matrix B = cm.block(mode, mode) + Matrix::Identity(2, 2);
  return CovarianceMatrix(A - C * B.inverse() * C.transpose());
}

} // namespace rqc::gaussian
