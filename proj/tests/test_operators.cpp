#include "erkc/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using erkc::CollocationScheme;
using erkc::DiagonalizableOperator;
using erkc::StateVector;

namespace {

StateVector random_vec(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  StateVector v(n);
  for (double& x : v) x = uni(rng);
  return v;
}

double max_abs_diff(const StateVector& a, const StateVector& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const StateVector& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(Operators, DirichletEigenvalueFormula) {
  const int n = 63;
  auto op = DiagonalizableOperator::dirichlet_1d(n);
  const double hx = 1.0 / (n + 1);
  for (int k = 1; k <= n; ++k) {
    const double expected =
        4.0 / (hx * hx) * std::pow(std::sin(k * M_PI / (2.0 * (n + 1))), 2);
    EXPECT_NEAR(op.eigenvalues()[k - 1], expected, 1e-9 * expected);
  }
}

TEST(Operators, TransformRoundTrip) {
  for (int n : {5, 63, 64, 200}) {
    auto op = DiagonalizableOperator::dirichlet_1d(n);
    auto v = random_vec(n, 1000 + n);
    auto w = op.inverse(op.forward(v));
    EXPECT_LE(max_abs_diff(v, w), 1e-12 * max_abs(v)) << "dirichlet n=" << n;
  }
  for (int n : {4, 16, 130}) {
    auto op = DiagonalizableOperator::periodic_1d(n);
    auto v = random_vec(n, 2000 + n);
    auto w = op.inverse(op.forward(v));
    EXPECT_LE(max_abs_diff(v, w), 1e-12 * max_abs(v)) << "periodic n=" << n;
  }
  for (int n : {3, 17}) {
    auto op = DiagonalizableOperator::dirichlet_2d(n);
    auto v = random_vec(n * n, 3000 + n);
    auto w = op.inverse(op.forward(v));
    EXPECT_LE(max_abs_diff(v, w), 1e-12 * max_abs(v)) << "dirichlet2d n=" << n;
  }
}

TEST(Operators, SemigroupIdentityAtZero) {
  auto op = DiagonalizableOperator::dirichlet_1d(33);
  auto v = random_vec(33, 77);
  EXPECT_LE(max_abs_diff(op.apply_semigroup(0.0, v), v), 1e-12 * max_abs(v));
}

TEST(Operators, SemigroupDiagonal) {
  auto op = DiagonalizableOperator::diagonal({1.0, 2.0});
  StateVector v{1.0, 1.0};
  auto w = op.apply_semigroup(1.0, v);
  EXPECT_NEAR(w[0], std::exp(-1.0), 1e-15);
  EXPECT_NEAR(w[1], std::exp(-2.0), 1e-15);
}

TEST(Operators, SemigroupOnSineMode) {
  const int n = 63;
  auto op = DiagonalizableOperator::dirichlet_1d(n);
  StateVector v(n);
  for (int i = 0; i < n; ++i) v[i] = std::sin(M_PI * (i + 1) / (n + 1.0));
  const double lam1 = op.eigenvalues()[0];
  auto w = op.apply_semigroup(0.1, v);
  for (int i = 0; i < n; ++i)
    EXPECT_NEAR(w[i], std::exp(-0.1 * lam1) * v[i], 1e-10);
}

TEST(Operators, PhiActions) {
  auto z0 = DiagonalizableOperator::diagonal({0.0});
  for (int j = 1; j <= 4; ++j) {
    auto w = z0.apply_phi(j, 3.7, StateVector{1.0});
    EXPECT_NEAR(w[0], erkc::detail::inv_factorial(j), 1e-15);
  }
  auto op = DiagonalizableOperator::diagonal({10.0});
  auto w = op.apply_phi(1, 1.0, StateVector{1.0});
  EXPECT_NEAR(w[0], (1.0 - std::exp(-10.0)) / 10.0, 1e-14);
  // t = 0 reduces to v / j!
  auto d = DiagonalizableOperator::dirichlet_1d(17);
  auto v = random_vec(17, 5);
  auto p2 = d.apply_phi(2, 0.0, v);
  for (int i = 0; i < 17; ++i) EXPECT_NEAR(p2[i], v[i] / 2.0, 1e-12);
}

TEST(Operators, WeightActionMatchesScalarPath) {
  const auto radau = CollocationScheme::radau_iia(2);
  auto op = DiagonalizableOperator::diagonal({3.0, 7.0});
  const double theta = 1.0 / 3.0, h = 0.2;
  for (int i = 0; i < 2; ++i) {
    auto w = op.apply_weight(radau, i, theta, h, StateVector{1.0, 1.0});
    EXPECT_NEAR(w[0], erkc::weight_b(radau, i, theta, -h * 3.0), 1e-14);
    EXPECT_NEAR(w[1], erkc::weight_b(radau, i, theta, -h * 7.0), 1e-14);
  }
  // s=1: b_1(theta; -hA) = theta phi_1(-theta h A)
  const CollocationScheme be({1.0});
  auto d = DiagonalizableOperator::dirichlet_1d(21);
  auto v = random_vec(21, 9);
  auto lhs = d.apply_weight(be, 0, 0.4, 0.3, v);
  auto rhs = d.apply_phi(1, 0.4 * 0.3, v);
  for (int i = 0; i < 21; ++i) EXPECT_NEAR(lhs[i], 0.4 * rhs[i], 1e-12);
}

TEST(Operators, FractionalPowers) {
  auto op = DiagonalizableOperator::diagonal({4.0});
  EXPECT_NEAR(op.apply_fractional_power(0.5, StateVector{1.0})[0], 2.0, 1e-15);
  EXPECT_EQ(op.apply_fractional_power(0.0, StateVector{1.0})[0], 1.0);

  auto d = DiagonalizableOperator::dirichlet_1d(40);
  auto v = random_vec(40, 11);
  auto once = d.apply_fractional_power(0.5, v);
  auto twice = d.apply_fractional_power(0.5, once);
  auto full = d.apply_fractional_power(1.0, v);
  EXPECT_LE(max_abs_diff(twice, full), 1e-10 * max_abs(full));

  auto per = DiagonalizableOperator::periodic_1d(8);
  EXPECT_THROW(per.apply_fractional_power(-0.5, random_vec(8, 2)),
               erkc::ZeroEigenvalueNegativePower);
}

TEST(Operators, DimensionChecks) {
  auto op = DiagonalizableOperator::dirichlet_1d(8);
  EXPECT_THROW(op.apply_semigroup(0.1, StateVector(7, 0.0)), erkc::DimensionError);
}

TEST(Operators, PeriodicLaplacianActsOnFourierMode) {
  const int n = 16;
  auto op = DiagonalizableOperator::periodic_1d(n);
  StateVector v(n);
  for (int i = 0; i < n; ++i) v[i] = std::sin(2.0 * M_PI * i / n);
  auto av = op.apply_fractional_power(1.0, v);
  const double lam = 4.0 * M_PI * M_PI;
  for (int i = 0; i < n; ++i) EXPECT_NEAR(av[i], lam * v[i], 1e-10 * lam);
}

TEST(Operators, DenseScalarOracleOnSmallDiagonals) {
  // apply_semigroup / apply_phi agree with per-eigenvalue scalar computation.
  std::mt19937 rng(321);
  std::uniform_real_distribution<double> lam(0.0, 50.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> eig(8);
    for (double& l : eig) l = lam(rng);
    auto op = DiagonalizableOperator::diagonal(eig);
    auto v = random_vec(8, 400 + trial);
    auto e = op.apply_semigroup(0.37, v);
    auto p3 = op.apply_phi(3, 0.37, v);
    for (int i = 0; i < 8; ++i) {
      EXPECT_NEAR(e[i], std::exp(-0.37 * eig[i]) * v[i], 1e-13);
      EXPECT_NEAR(p3[i], erkc::phi(3, -0.37 * eig[i]) * v[i], 1e-13);
    }
  }
}

TEST(Operators, SmoothingBoundSurrogate) {
  // max_k (theta h lambda_k)^gamma |b_i(theta; -h lambda_k)| stays below 10
  // for the Dirichlet operator; regression guard for the parabolic smoothing
  // estimate the error analysis leans on.
  auto op = DiagonalizableOperator::dirichlet_1d(200);
  const auto gauss = CollocationScheme::gauss(2);
  for (double gamma : {0.0, 0.5, 1.0}) {
    double worst = 0.0;
    for (double theta : {0.2, 0.5, 1.0}) {
      for (double h : {1e-3, 1e-2, 0.1, 0.5}) {
        for (int i = 0; i < gauss.size(); ++i) {
          for (double lamk : op.eigenvalues()) {
            const double val = std::pow(theta * h * lamk, gamma) *
                               std::abs(erkc::weight_b(gauss, i, theta, -h * lamk));
            worst = std::max(worst, val);
          }
        }
      }
    }
    EXPECT_LE(worst, 10.0) << "gamma=" << gamma;
  }
}
