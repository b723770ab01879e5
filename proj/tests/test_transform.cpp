#include <gtest/gtest.h>

#include "lhsis/algebra.hpp"
#include "lhsis/sampling.hpp"
#include "lhsis/transform.hpp"
#include "oracles.hpp"

using namespace lhsis;

TEST(EpiToCart, Examples) {
  auto c = epi_to_cart(2.0, 1.0);
  EXPECT_DOUBLE_EQ(c[0], 3.0);
  EXPECT_DOUBLE_EQ(c[1], 2.0 / 3.0);
  c = epi_to_cart(2.0 / 3.0, 3.0);
  EXPECT_NEAR(c[0], 1.0, 1e-15);
  EXPECT_NEAR(c[1], 2.0, 1e-15);
  EXPECT_THROW(epi_to_cart(1.0, 1.0), SingularPointError);
  EXPECT_THROW(epi_to_cart(1.0, 0.0), SingularPointError);
}

TEST(CartToEpi, Examples) {
  auto e = cart_to_epi(3.0, 2.0 / 3.0);
  EXPECT_NEAR(e[0], 2.0, 1e-15);
  EXPECT_NEAR(e[1], 1.0, 1e-15);
  e = cart_to_epi(1.0, 2.0);
  EXPECT_DOUBLE_EQ(e[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(e[1], 3.0);
  EXPECT_THROW(cart_to_epi(0.0, 5.0), SingularPointError);
  EXPECT_THROW(cart_to_epi(1.0, 1.0), SingularPointError);
}

TEST(Transform, MatchesReferenceFormulas) {
  Rng rng(21);
  for (int k = 0; k < 1000; ++k) {
    const auto s = random_epidemic(rng);
    const auto c = epi_to_cart(s.first, s.second);
    const auto r = oracle::epi_to_cart(s.first, s.second);
    EXPECT_LE(oracle::scaled(c[0], r[0]), 1e-12);
    EXPECT_LE(oracle::scaled(c[1], r[1]), 1e-12);
    const auto e = cart_to_epi(c[0], c[1]);
    const auto re = oracle::cart_to_epi(c[0], c[1]);
    EXPECT_LE(oracle::scaled(e[0], re[0]), 1e-12);
    EXPECT_LE(oracle::scaled(e[1], re[1]), 1e-12);
  }
}

TEST(Transform, RoundTrip) {
  Rng rng(3);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const auto s = random_epidemic(rng);
    const auto c = epi_to_cart(s.first, s.second);
    const auto e = cart_to_epi(c[0], c[1]);
    worst = std::max({worst, std::abs(e[0] - s.first) / std::abs(s.first), std::abs(e[1] - s.second) / std::abs(s.second)});
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Observables, Examples) {
  auto o = observables(0.4, 10.0);
  EXPECT_EQ(o.mean_rho, 0.4);
  EXPECT_DOUBLE_EQ(o.variance, 0.01);
  o = observables(0.4, -10.0);
  EXPECT_EQ(o.mean_rho, 0.4);
  EXPECT_DOUBLE_EQ(o.variance, 0.01);
  EXPECT_THROW(observables(0.4, 0.0), DomainError);
}

TEST(JacobianDet, Examples) {
  EXPECT_NEAR(jacobian_det(PhaseState::epidemic(2.0, 1.0)), 1.0, 1e-8);
  EXPECT_NEAR(jacobian_det(PhaseState::cartesian(1.0, 2.0)), 1.0, 1e-8);
  EXPECT_THROW(jacobian_det(PhaseState::epidemic(1.0, 1.0)), SingularPointError);
}

TEST(JacobianDet, AnalyticDeterminantIsOne) {
  Rng rng(4);
  for (int k = 0; k < 1000; ++k) {
    const auto s = random_epidemic(rng);
    EXPECT_NEAR(oracle::det(oracle::jacobian_epi_to_cart(s.first, s.second)), 1.0, 1e-6);
  }
}

TEST(JacobianDet, RandomPointsBothDirections) {
  Rng rng(8);
  for (int k = 0; k < 2000; ++k) {
    const auto s = random_epidemic(rng);
    EXPECT_NEAR(jacobian_det(s), 1.0, 1e-8);
    EXPECT_NEAR(jacobian_det(to_chart(s, ChartId::Cartesian)), 1.0, 1e-8);
    const auto c = random_cartesian(rng);
    EXPECT_NEAR(jacobian_det(c), 1.0, 1e-8);
  }
}

TEST(Transform, PullbackOfHamiltonians) {
  Rng rng(12);
  for (int k = 0; k < 500; ++k) {
    const auto s = random_epidemic(rng);
    const auto c = to_chart(s, ChartId::Cartesian);
    for (int i = 0; i <= 5; ++i) {
      const double he = basis_hamiltonian(AlgebraId::H6, i, s);
      const double hc = basis_hamiltonian(AlgebraId::H6, i, c);
      EXPECT_LE(std::abs(he - hc) / std::max(1.0, std::abs(hc)), 1e-10) << "h" << i;
    }
  }
}

TEST(PhaseState, ChartConversionRoundTrip) {
  const auto s = PhaseState::epidemic(0.3, 4.0);
  const auto back = to_chart(to_chart(s, ChartId::Cartesian), ChartId::Epidemic);
  EXPECT_EQ(back.chart, ChartId::Epidemic);
  EXPECT_NEAR(back.first, 0.3, 1e-14);
  EXPECT_NEAR(back.second, 4.0, 1e-14);
  EXPECT_EQ(to_chart(s, ChartId::Epidemic).first, 0.3);
}
