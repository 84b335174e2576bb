#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rqc/gaussian.hpp"

using namespace rqc;
using namespace rqc::gaussian;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// |eigenvalues| of i Omega S by a general (non-symmetric) solver, each pair
// collapsed to one value.
std::vector<double> spectrum_oracle(const Matrix &s) {
  const auto n = s.rows() / 2;
  const Matrix m = omega(static_cast<std::size_t>(n)) * s;
  Eigen::EigenSolver<Matrix> es(m);
  std::vector<double> mags;
  for (Eigen::Index k = 0; k < m.rows(); ++k)
    mags.push_back(std::abs(es.eigenvalues()(k)));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  std::vector<double> nu;
  for (std::size_t k = 0; k < mags.size(); k += 2)
    nu.push_back(mags[k]);
  return nu;
}

Matrix squeezer(std::size_t modes, std::size_t mode, double r) {
  Matrix S = Matrix::Identity(2 * modes, 2 * modes);
  const auto i = static_cast<Eigen::Index>(2 * mode);
  S(i, i) = std::exp(-r);
  S(i + 1, i + 1) = std::exp(r);
  return S;
}

Matrix rotation(std::size_t modes, std::size_t mode, double th) {
  Matrix S = Matrix::Identity(2 * modes, 2 * modes);
  const auto i = static_cast<Eigen::Index>(2 * mode);
  S(i, i) = S(i + 1, i + 1) = std::cos(th);
  S(i, i + 1) = std::sin(th);
  S(i + 1, i) = -std::sin(th);
  return S;
}

Matrix beamsplitter(std::size_t modes, std::size_t a, std::size_t b, double th) {
  Matrix S = Matrix::Identity(2 * modes, 2 * modes);
  const double c = std::cos(th), s = std::sin(th);
  for (Eigen::Index q = 0; q < 2; ++q) {
    const auto i = static_cast<Eigen::Index>(2 * a) + q;
    const auto j = static_cast<Eigen::Index>(2 * b) + q;
    S(i, i) = S(j, j) = c;
    S(i, j) = s;
    S(j, i) = -s;
  }
  return S;
}

} // namespace

TEST_CASE("omega is the symplectic form") {
  const Matrix w = omega(2);
  CHECK((w * w + Matrix::Identity(4, 4)).norm() == 0.0);
  CHECK((w + w.transpose()).norm() == 0.0);
}

TEST_CASE("random symplectic frames reproduce the planted spectrum") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> sq(-1.0, 1.0);
  std::uniform_real_distribution<double> nu_dist(1.0, 20.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
    std::vector<double> nu(n);
    Matrix D = Matrix::Zero(2 * n, 2 * n);
    for (std::size_t k = 0; k < n; ++k) {
      nu[k] = nu_dist(rng);
      D(2 * k, 2 * k) = D(2 * k + 1, 2 * k + 1) = nu[k];
    }
    Matrix S = Matrix::Identity(2 * n, 2 * n);
    for (std::size_t k = 0; k < n; ++k)
      S = squeezer(n, k, sq(rng)) * rotation(n, k, angle(rng)) * S;
    S = beamsplitter(n, 0, 1, angle(rng)) * S;
    if (n == 3)
      S = beamsplitter(n, 1, 2, angle(rng)) * squeezer(n, 2, sq(rng)) * S;
    const CovarianceMatrix cm(S * D * S.transpose());
    std::sort(nu.begin(), nu.end(), std::greater<>());
    const auto got = symplectic_eigenvalues(cm);
    const auto oracle = spectrum_oracle(cm.matrix());
    REQUIRE(got.size() == n);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK_THAT(got[k], WithinRel(nu[k], 1e-9));
      CHECK_THAT(got[k], WithinRel(oracle[k], 1e-9));
    }
  }
}

TEST_CASE("two-mode spectrum obeys the Delta and determinant invariants") {
  for (double V : {2.0, 10.0})
    for (double G : {1.0, 1.7, 5.0})
      for (double eta : {0.3, 0.9, 1.0}) {
        const auto cm = apply_channel(tmsv(V), 1, G, eta);
        const Matrix A = cm.block(0, 0), B = cm.block(1, 1), C = cm.block(0, 1);
        const double delta = A.determinant() + B.determinant() + 2.0 * C.determinant();
        const auto nu = symplectic_eigenvalues(cm);
        CHECK_THAT(nu[0] * nu[0] + nu[1] * nu[1], WithinRel(delta, 1e-10));
        CHECK_THAT(nu[0] * nu[1], WithinRel(std::sqrt(cm.matrix().determinant()), 1e-9));
      }
}

TEST_CASE("tmsv is pure with unit spectrum; its marginal is thermal") {
  // Rounding sqrt(V^2 - 1) perturbs the purity by ~ V^2 eps, so V stays <= 100.
  for (double V : {1.0, 1.5, 3.0, 10.0, 100.0}) {
    const auto s = tmsv(V);
    for (double nu : symplectic_eigenvalues(s))
      CHECK_THAT(nu, WithinAbs(1.0, 1e-10));
    CHECK(std::abs(entropy(s)) < 1e-10);
    const auto a = s.reduced({0});
    const double x = 0.5 * (V - 1.0);
    const double expected = x > 0.0 ? (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x) : 0.0;
    CHECK_THAT(entropy(a), WithinAbs(expected, 1e-10 * std::max(1.0, expected)));
  }
  CHECK_THROWS_AS(tmsv(0.5), DomainError);
}

TEST_CASE("thermal entropy closed form") {
  CHECK(std::abs(entropy(CovarianceMatrix::vacuum(2))) < 1e-12);
  // V = 3: mean photon number 1, S = 2 bits.
  CHECK_THAT(entropy(CovarianceMatrix::thermal(3.0)), WithinAbs(2.0, 1e-12));
  CHECK_THAT(entropy_g(1.0), WithinAbs(2.0, 1e-15));
  CHECK(entropy_g(0.0) == 0.0);
}

TEST_CASE("channel action on the moments") {
  const double V = 5.0, G = 2.0, eta = 0.6;
  const auto s = apply_channel(tmsv(V), 1, G, eta);
  const double c = std::sqrt(V * V - 1.0);
  CHECK_THAT(s(2, 2), WithinRel(eta * (G * V + G - 1.0) + 1.0 - eta, 1e-15));
  CHECK_THAT(s(3, 3), WithinRel(s(2, 2), 1e-15));
  CHECK_THAT(s(0, 2), WithinRel(std::sqrt(eta * G) * c, 1e-15));
  CHECK_THAT(s(1, 3), WithinRel(-std::sqrt(eta * G) * c, 1e-15));
  CHECK(s(0, 0) == V);
  CHECK(is_physical(s));
  CHECK_THROWS_AS(apply_channel(tmsv(V), 1, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(apply_channel(tmsv(V), 2, 1.0, 1.0), DomainError);
}

TEST_CASE("unphysical matrices are rejected") {
  Matrix m = Matrix::Identity(2, 2) * 0.5;
  const CovarianceMatrix sub(m);
  CHECK_FALSE(is_physical(sub));
  CHECK_THROWS_AS(entropy(sub), DomainError);
  Matrix neg = Matrix::Identity(2, 2);
  neg(1, 1) = -1.0;
  CHECK_THROWS_AS(symplectic_eigenvalues(CovarianceMatrix(neg)), DomainError);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.3;
  CHECK_THROWS_AS(CovarianceMatrix(asym), DomainError);
}

TEST_CASE("homodyne conditioning of a tmsv") {
  const double V = 7.0;
  const auto a = homodyne_condition(tmsv(V), 1);
  CHECK_THAT(a(0, 0), WithinRel(1.0 / V, 1e-12));
  CHECK_THAT(a(1, 1), WithinRel(V, 1e-12));
  CHECK(std::abs(entropy(a)) < 1e-10);
  CHECK_THROWS_AS(homodyne_condition(CovarianceMatrix::vacuum(1), 0), DomainError);
}

TEST_CASE("heterodyne conditioning of a tmsv leaves the vacuum") {
  const auto a = heterodyne_condition(tmsv(4.0), 1);
  CHECK_THAT(a(0, 0), WithinAbs(1.0, 1e-12));
  CHECK_THAT(a(1, 1), WithinAbs(1.0, 1e-12));
  CHECK_THAT(a(0, 1), WithinAbs(0.0, 1e-12));
}
