#include "erkc/phi.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "erkc/verification.hpp"
#include "oracle.hpp"

using erkc::CollocationScheme;
using erkc::phi;
using erkc::weight_b;

TEST(Phi, ValuesAtZeroAndClosedForms) {
  EXPECT_DOUBLE_EQ(phi(1, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(phi(2, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(phi(3, 0.0), 1.0 / 6.0);
  EXPECT_NEAR(phi(1, 1.0), 1.7182818284590452354, 1e-15);
  // frozen 50-digit oracle values
  EXPECT_NEAR(phi(2, -10.0), 0.090000453999297624849, 1e-12 * 0.09);
  EXPECT_NEAR(phi(3, -10.0), 0.040999954600070237515, 1e-12 * 0.041);
  EXPECT_NEAR(phi(1, -0.3), 0.86393926439427377978, 1e-14);
  EXPECT_NEAR(phi(4, 0.4), 0.045235584945455123367, 1e-14);
  EXPECT_NEAR(phi(2, 30.0), 11873860646.10384683, 1e-4);
}

TEST(Phi, MatchesHighPrecisionOracleAcrossMagnitudes) {
  // |z| <= 50 keeps the alternating-series cancellation within the oracle's
  // 50-digit budget; larger |z| is covered by the recurrence and limit tests.
  std::mt19937 rng(20240831);
  std::uniform_real_distribution<double> mag(-8.0, std::log10(50.0));
  std::uniform_real_distribution<double> sign(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double z = (sign(rng) < 0.5 ? -1.0 : 1.0) * std::pow(10.0, mag(rng));
    for (int j = 0; j <= 6; ++j) {
      const double ref = oracle::phi_oracle(j, z);
      EXPECT_NEAR(phi(j, z), ref, 1e-13 * std::max(1.0, std::abs(ref)))
          << "j=" << j << " z=" << z;
    }
  }
}

TEST(Phi, RecurrenceResidual) {
  // Negative arguments over the full 1e-8..1e3 magnitude range; positive ones
  // capped at 500 so that e^z stays representable in double.
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> mag(-8.0, 3.0);
  std::uniform_real_distribution<double> sign(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    double z = -std::pow(10.0, mag(rng));
    if (sign(rng) < 0.5) z = std::min(-z, 500.0);
    for (int j = 0; j <= 6; ++j) {
      const double lhs = phi(j + 1, z);
      const double rhs = (phi(j, z) - erkc::detail::inv_factorial(j)) / z;
      // The subtraction amplifies the rounding of phi_j by 1/|z|; that floor
      // is intrinsic to evaluating the right-hand side in double precision.
      const double cond = 4.0 * 2.3e-16 * erkc::detail::inv_factorial(j) / std::abs(z);
      EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(lhs)) + cond)
          << "j=" << j << " z=" << z;
    }
  }
}

TEST(Phi, LargeNegativeArgumentStable) {
  // e^z underflows; phi_1(z) -> -1/z
  const double z = -2.0e5;
  EXPECT_NEAR(phi(1, z), 1.0 / 2.0e5, 1e-18);
  EXPECT_GT(phi(2, z), 0.0);
}

TEST(Phi, ComplexArguments) {
  const std::complex<double> z(0.0, 3.0);
  const std::complex<double> expected = (std::exp(z) - 1.0) / z;
  EXPECT_LT(std::abs(phi(1, z) - expected), 1e-14);
}

TEST(Scheme, RejectsBadNodes) {
  EXPECT_THROW(CollocationScheme({0.5, 0.5}), erkc::ConfluentNodes);
  EXPECT_THROW(CollocationScheme({-0.1}), erkc::NodeOutOfRange);
  EXPECT_THROW(CollocationScheme({0.2, 1.3}), erkc::NodeOutOfRange);
  EXPECT_THROW(CollocationScheme(std::vector<double>{}), erkc::NodeOutOfRange);
}

TEST(Scheme, BackwardEulerNode) {
  const CollocationScheme be({1.0});
  EXPECT_EQ(be.size(), 1);
  EXPECT_DOUBLE_EQ(be.lagrange(0, 0.3), 1.0);
  EXPECT_EQ(be.quadrature_order(), 1);
}

TEST(Scheme, RadauS2Monomials) {
  const CollocationScheme r = CollocationScheme::radau_iia(2);
  // l_1(xi) = 3/2 - (3/2) xi, l_2(xi) = (xi - 1/3) / (2/3)
  EXPECT_NEAR(r.monomial(0, 0), 1.5, 1e-14);
  EXPECT_NEAR(r.monomial(0, 1), -1.5, 1e-14);
  EXPECT_NEAR(r.monomial(1, 0), -0.5, 1e-14);
  EXPECT_NEAR(r.monomial(1, 1), 1.5, 1e-14);
  EXPECT_EQ(r.quadrature_order(), 3);
}

TEST(Scheme, LagrangeCardinalAndPartitionOfUnity) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (const auto& sch :
       {CollocationScheme::gauss(2), CollocationScheme::gauss(3),
        CollocationScheme::radau_iia(2), CollocationScheme::radau_iia(3),
        CollocationScheme({0.25, 0.75})}) {
    for (int i = 0; i < sch.size(); ++i)
      for (int j = 0; j < sch.size(); ++j)
        EXPECT_NEAR(sch.lagrange(i, sch.node(j)), i == j ? 1.0 : 0.0, 1e-12);
    for (int t = 0; t < 50; ++t) {
      const double xi = uni(rng);
      double sum = 0.0;
      for (int i = 0; i < sch.size(); ++i) sum += sch.lagrange(i, xi);
      EXPECT_NEAR(sum, 1.0, 1e-13);
    }
  }
}

TEST(Scheme, QuadratureOrders) {
  EXPECT_EQ(CollocationScheme::gauss(1).quadrature_order(), 2);
  EXPECT_EQ(CollocationScheme::gauss(2).quadrature_order(), 4);
  EXPECT_EQ(CollocationScheme::gauss(3).quadrature_order(), 6);
  EXPECT_EQ(CollocationScheme::radau_iia(2).quadrature_order(), 3);
  EXPECT_EQ(CollocationScheme::radau_iia(3).quadrature_order(), 5);
  EXPECT_EQ(CollocationScheme({0.25, 0.75}).quadrature_order(), 2);
  // Radau s=2: sum b_i(0) c_i^2 = (3/4)(1/9) + (1/4)(1) = 1/3 = 1/(s+1)
  const auto r = CollocationScheme::radau_iia(2);
  EXPECT_NEAR(r.weight0(0) * std::pow(r.node(0), 2) +
                  r.weight0(1) * std::pow(r.node(1), 2),
              1.0 / 3.0, 1e-14);
}

TEST(Weights, BackwardEulerWeightIsThetaPhi1) {
  const CollocationScheme be({1.0});
  for (double theta : {0.1, 0.5, 1.0})
    for (double z : {-30.0, -2.0, 0.0, 1.5})
      EXPECT_NEAR(weight_b(be, 0, theta, z), theta * phi(1, theta * z), 1e-14);
}

TEST(Weights, S2ClosedForm) {
  // b_1(theta;z) = c2/(c2-c1) theta phi_1(theta z) - 1/(c2-c1) theta^2 phi_2(theta z)
  const double c1 = 1.0 / 3.0, c2 = 1.0;
  const CollocationScheme sch({c1, c2});
  for (double theta : {0.2, 1.0 / 3.0, 1.0}) {
    for (double z : {-5.0, -0.1, 0.0, 2.0}) {
      const double p1 = phi(1, theta * z), p2 = phi(2, theta * z);
      const double b1 = c2 / (c2 - c1) * theta * p1 - 1.0 / (c2 - c1) * theta * theta * p2;
      const double b2 = -c1 / (c2 - c1) * theta * p1 + 1.0 / (c2 - c1) * theta * theta * p2;
      EXPECT_NEAR(weight_b(sch, 0, theta, z), b1, 1e-13 * std::max(1.0, std::abs(b1)));
      EXPECT_NEAR(weight_b(sch, 1, theta, z), b2, 1e-13 * std::max(1.0, std::abs(b2)));
    }
  }
}

TEST(Weights, RadauWeightsAtZeroAreQuadratureWeights) {
  const CollocationScheme r = CollocationScheme::radau_iia(2);
  EXPECT_NEAR(weight_b(r, 0, 1.0, 0.0), 0.75, 1e-14);
  EXPECT_NEAR(weight_b(r, 1, 1.0, 0.0), 0.25, 1e-14);
}

TEST(Weights, MatchQuadratureOracle) {
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> th(0.05, 1.0);
  std::uniform_real_distribution<double> zz(-20.0, 2.0);
  for (const auto& sch : {CollocationScheme::gauss(3), CollocationScheme::radau_iia(2)}) {
    for (int trial = 0; trial < 40; ++trial) {
      const double theta = th(rng), z = zz(rng);
      for (int i = 0; i < sch.size(); ++i) {
        const double ref = erkc::verify::quad_weight_oracle(sch, i, theta, z);
        EXPECT_NEAR(weight_b(sch, i, theta, z), ref,
                    1e-11 * std::max(1.0, std::abs(ref)))
            << "theta=" << theta << " z=" << z << " i=" << i;
      }
    }
  }
}

TEST(Weights, InternalCoefficientsEqualWeightsAtNodes) {
  // a_ij(z) = b_j(c_i; z), checked against the quadrature oracle directly.
  const auto sch = CollocationScheme::radau_iia(3);
  for (double z : {-8.0, -1.0, 0.0}) {
    for (int i = 0; i < sch.size(); ++i) {
      for (int j = 0; j < sch.size(); ++j) {
        const double a_quad = erkc::verify::quad_weight_oracle(sch, j, sch.node(i), z);
        EXPECT_NEAR(weight_b(sch, j, sch.node(i), z), a_quad,
                    1e-11 * std::max(1.0, std::abs(a_quad)));
      }
    }
  }
}

TEST(OrderConditions, IdentityCaseAndGenericArguments) {
  for (const auto& sch : {CollocationScheme::gauss(2), CollocationScheme::radau_iia(2),
                          CollocationScheme::gauss(3)}) {
    auto rep = erkc::check_order_conditions(sch, 1.0, 0.0, 1e-14);
    EXPECT_TRUE(rep.pass);
  }
  auto rep = erkc::check_order_conditions(CollocationScheme::radau_iia(2),
                                          1.0 / 3.0, -5.0, 1e-12);
  EXPECT_TRUE(rep.pass);
}

TEST(OrderConditions, RandomRealAndComplexArguments) {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> th(0.01, 1.0);
  std::uniform_real_distribution<double> re(-50.0, 3.0);
  std::uniform_real_distribution<double> im(-10.0, 10.0);
  const auto g3 = CollocationScheme::gauss(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double theta = th(rng);
    const std::complex<double> z(re(rng), im(rng));
    auto rep = erkc::check_order_conditions(g3, theta, z, 1e-11);
    EXPECT_TRUE(rep.pass) << "theta=" << theta << " z=" << z;
  }
  // imaginary test argument from the contract examples
  auto rep = erkc::check_order_conditions(g3, 0.7, std::complex<double>(0.0, 3.0), 1e-12);
  EXPECT_TRUE(rep.pass);
}
