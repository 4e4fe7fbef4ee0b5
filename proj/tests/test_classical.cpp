#include <cmath>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vcop/classical.hpp"
#include "vcop/rng.hpp"

namespace vcop {
namespace {

using testing::pairwise_tau;

TEST(TauConversion, ClosedFormAnchors) {
  EXPECT_NEAR(tau_from_theta(ClassicalFamily::clayton, 2.0), 0.5, 1e-15);
  EXPECT_NEAR(tau_from_theta(ClassicalFamily::gumbel, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(tau_from_theta(ClassicalFamily::gumbel, 2.0), 0.5, 1e-15);
  EXPECT_NEAR(theta_from_tau(ClassicalFamily::gaussian, 0.44), 0.6374239897486896, 1e-12);
  EXPECT_NEAR(tau_from_theta(ClassicalFamily::independence, 0.0), 0.0, 0.0);
}

TEST(TauConversion, FrankDebyeAnchors) {
  EXPECT_NEAR(tau_from_theta(ClassicalFamily::frank, 4.0), 0.388148021297938, 1e-12);
  EXPECT_NEAR(tau_from_theta(ClassicalFamily::frank, -3.0), -0.307246959430724, 1e-12);
  EXPECT_NEAR(tau_from_theta(ClassicalFamily::frank, 0.05), 0.005555416672574864, 1e-14);
  EXPECT_NEAR(theta_from_tau(ClassicalFamily::frank, 0.5), 5.736282707020, 1e-8);
}

TEST(TauConversion, RoundTripsAcrossRanges) {
  for (int i = 1; i <= 50; ++i) {
    const double tau = -0.96 + 1.92 * i / 51.0;
    if (std::abs(tau) > 1e-3) {
      EXPECT_NEAR(tau_from_theta(ClassicalFamily::frank,
                                 theta_from_tau(ClassicalFamily::frank, tau)),
                  tau, 1e-8);
      EXPECT_NEAR(tau_from_theta(ClassicalFamily::clayton,
                                 theta_from_tau(ClassicalFamily::clayton, tau)),
                  tau, 1e-8);
    }
    EXPECT_NEAR(tau_from_theta(ClassicalFamily::gaussian,
                               theta_from_tau(ClassicalFamily::gaussian, tau)),
                tau, 1e-8);
    if (tau >= 0.0)
      EXPECT_NEAR(tau_from_theta(ClassicalFamily::gumbel,
                                 theta_from_tau(ClassicalFamily::gumbel, tau)),
                  tau, 1e-8);
  }
}

TEST(TauConversion, RejectsOutOfRange) {
  EXPECT_THROW(theta_from_tau(ClassicalFamily::clayton, 0.0), ConfigError);
  EXPECT_THROW(theta_from_tau(ClassicalFamily::gumbel, -0.2), ConfigError);
  EXPECT_THROW(theta_from_tau(ClassicalFamily::frank, 1.0), ConfigError);
  EXPECT_THROW(theta_from_tau(ClassicalFamily::gaussian, -1.0), ConfigError);
  EXPECT_THROW(validate_classical_theta(ClassicalFamily::clayton, 0.0), ConfigError);
  EXPECT_THROW(validate_classical_theta(ClassicalFamily::clayton, -1.5), ConfigError);
  EXPECT_THROW(validate_classical_theta(ClassicalFamily::gumbel, 0.99), ConfigError);
  EXPECT_THROW(validate_classical_theta(ClassicalFamily::gaussian, 1.0), ConfigError);
  EXPECT_NO_THROW(validate_classical_theta(ClassicalFamily::clayton, -1.0));
}

TEST(FamilyParsing, RoundTrips) {
  for (const auto f : {ClassicalFamily::clayton, ClassicalFamily::frank,
                       ClassicalFamily::gumbel, ClassicalFamily::gaussian,
                       ClassicalFamily::independence})
    EXPECT_EQ(parse_classical_family(to_string(f)), f);
  EXPECT_THROW(parse_classical_family("joe"), ConfigError);
}

TEST(ClassicalCopula, ClaytonAnchors) {
  const ClassicalCopula pos(ClassicalFamily::clayton, 2.0);
  EXPECT_NEAR(pos.cdf(0.3, 0.7), 0.286864902505703, 1e-12);
  EXPECT_NEAR(pos.density(0.3, 0.7), 0.629289451001216, 1e-12);
  EXPECT_NEAR(pos.conditional(0.3, 0.7), 0.874316117607727, 1e-12);
  const ClassicalCopula neg(ClassicalFamily::clayton, -0.5);
  EXPECT_NEAR(neg.cdf(0.3, 0.7), 0.147749970912685, 1e-12);
  EXPECT_NEAR(neg.density(0.3, 0.7), 1.091089451179962, 1e-12);
  EXPECT_NEAR(neg.conditional(0.3, 0.7), 0.701783373301393, 1e-12);
  // Outside the negative-theta support curve the measure vanishes.
  EXPECT_EQ(neg.cdf(0.05, 0.05), 0.0);
  EXPECT_EQ(neg.density(0.05, 0.05), 0.0);
}

TEST(ClassicalCopula, FrankAnchors) {
  const ClassicalCopula pos(ClassicalFamily::frank, 4.0);
  EXPECT_NEAR(pos.cdf(0.3, 0.7), 0.276074406393027, 1e-12);
  EXPECT_NEAR(pos.density(0.3, 0.7), 0.679345841984338, 1e-12);
  EXPECT_NEAR(pos.conditional(0.3, 0.7), 0.869397816783688, 1e-12);
  const ClassicalCopula neg(ClassicalFamily::frank, -3.0);
  EXPECT_NEAR(neg.cdf(0.3, 0.7), 0.145664629178289, 1e-12);
  EXPECT_NEAR(neg.density(0.3, 0.7), 1.317444261848456, 1e-12);
  EXPECT_NEAR(neg.conditional(0.3, 0.7), 0.596573171409982, 1e-12);
}

TEST(ClassicalCopula, GumbelAnchors) {
  const ClassicalCopula cop(ClassicalFamily::gumbel, 2.0);
  EXPECT_NEAR(cop.cdf(0.3, 0.7), 0.284878062020950, 1e-12);
  EXPECT_NEAR(cop.density(0.3, 0.7), 0.663678396524011, 1e-12);
  EXPECT_NEAR(cop.conditional(0.3, 0.7), 0.910480386475455, 1e-12);
  // theta = 1 is exact independence.
  const ClassicalCopula ind(ClassicalFamily::gumbel, 1.0);
  EXPECT_NEAR(ind.cdf(0.3, 0.7), 0.21, 1e-12);
  EXPECT_NEAR(ind.density(0.3, 0.7), 1.0, 1e-12);
}

TEST(ClassicalCopula, GaussianAnchors) {
  const ClassicalCopula cop(ClassicalFamily::gaussian, 0.6);
  EXPECT_NEAR(cop.cdf(0.3, 0.7), 0.277233748924390, 1e-10);
  EXPECT_NEAR(cop.density(0.3, 0.7), 0.827496587771433, 1e-12);
  EXPECT_NEAR(cop.conditional(0.3, 0.7), 0.852865147279386, 1e-12);
  const ClassicalCopula half(ClassicalFamily::gaussian, 0.5);
  EXPECT_NEAR(half.density(0.5, 0.5), 2.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(half.cdf(0.5, 0.5), 1.0 / 3.0, 1e-12);
}

TEST(ClassicalCopula, BivariateNormalCdfAnchors) {
  EXPECT_NEAR(detail::bivariate_normal_cdf(0.5, -0.3, 0.4), 0.317126928286165, 1e-12);
  EXPECT_NEAR(detail::bivariate_normal_cdf(0.0, 1.2, -0.8), 0.387335979849561, 1e-12);
  EXPECT_NEAR(detail::bivariate_normal_cdf(0.0, 0.0, 0.5), 1.0 / 3.0, 1e-13);
  EXPECT_NEAR(detail::bivariate_normal_cdf(0.0, 0.0, -0.5), 1.0 / 6.0, 1e-13);
  EXPECT_NEAR(detail::bivariate_normal_cdf(1.2, 0.0, -0.8), 0.387335979849561, 1e-12);
}

TEST(ClassicalCopula, CdfMargins) {
  for (const auto& cop :
       {ClassicalCopula(ClassicalFamily::clayton, 2.0), ClassicalCopula(ClassicalFamily::clayton, -0.5),
        ClassicalCopula(ClassicalFamily::frank, 4.0), ClassicalCopula(ClassicalFamily::gumbel, 3.0),
        ClassicalCopula(ClassicalFamily::gaussian, 0.7)}) {
    for (const double u : {0.1, 0.5, 0.9}) {
      EXPECT_NEAR(cop.cdf(u, 1.0), u, 1e-9);
      EXPECT_NEAR(cop.cdf(1.0, u), u, 1e-9);
      EXPECT_LE(cop.cdf(u, 0.0), 1e-9);
    }
  }
}

TEST(ClassicalCopula, ConditionalInverseRoundTrips) {
  for (const auto& cop :
       {ClassicalCopula(ClassicalFamily::clayton, 2.0), ClassicalCopula(ClassicalFamily::clayton, -0.5),
        ClassicalCopula(ClassicalFamily::frank, 4.0), ClassicalCopula(ClassicalFamily::frank, -3.0),
        ClassicalCopula(ClassicalFamily::gumbel, 2.0), ClassicalCopula(ClassicalFamily::gumbel, 4.5),
        ClassicalCopula(ClassicalFamily::gaussian, 0.6),
        ClassicalCopula(ClassicalFamily::independence, 0.0)}) {
    for (const double u : {0.05, 0.3, 0.5, 0.8, 0.97}) {
      for (const double p : {0.02, 0.25, 0.5, 0.75, 0.98}) {
        const double v = cop.conditional_inverse(u, p);
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
        EXPECT_NEAR(cop.conditional(u, v), p, 1e-9)
            << to_string(cop.family()) << " theta=" << cop.theta() << " u=" << u << " p=" << p;
      }
    }
  }
}

TEST(ClassicalCopula, SamplerIsDeterministicAndRecoversTau) {
  for (const auto family : {ClassicalFamily::clayton, ClassicalFamily::frank,
                            ClassicalFamily::gumbel, ClassicalFamily::gaussian}) {
    const double theta = theta_from_tau(family, 0.5);
    const ClassicalCopula cop(family, theta);
    Rng rng1(321), rng2(321);
    const Eigen::MatrixXd a = cop.sample(2000, rng1);
    const Eigen::MatrixXd b = cop.sample(2000, rng2);
    EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_NEAR(pairwise_tau(a), 0.5, 0.05) << to_string(family);
  }
}

TEST(NestingCopula, IndependenceAndSingleBlock) {
  const NestingCopula ind({ClassicalFamily::independence, 0.0}, 3);
  EXPECT_EQ(ind.density(Eigen::Vector3d(0.2, 0.5, 0.9)), 1.0);
  const NestingCopula one({ClassicalFamily::gumbel, 3.0}, 1);
  EXPECT_EQ(one.spec().family, ClassicalFamily::independence);
  EXPECT_EQ(one.density(Eigen::VectorXd::Constant(1, 0.4)), 1.0);
}

TEST(NestingCopula, ExchangeableGaussianDensityAnchors) {
  const NestingCopula pos({ClassicalFamily::gaussian, 0.4}, 3);
  EXPECT_NEAR(pos.density(Eigen::Vector3d(0.3, 0.5, 0.7)), 1.034172606317362, 1e-12);
  const NestingCopula neg({ClassicalFamily::gaussian, -0.45}, 3);
  EXPECT_NEAR(neg.density(Eigen::Vector3d(0.3, 0.5, 0.7)), 2.375178385931733, 1e-12);
  EXPECT_THROW(NestingCopula({ClassicalFamily::gaussian, -0.55}, 3), ConfigError);
}

TEST(NestingCopula, BivariateGaussianMatchesClassical) {
  const NestingCopula nest({ClassicalFamily::gaussian, 0.6}, 2);
  const ClassicalCopula cop(ClassicalFamily::gaussian, 0.6);
  for (const double u : {0.1, 0.4, 0.8})
    for (const double v : {0.25, 0.6, 0.95})
      EXPECT_NEAR(nest.density(Eigen::Vector2d(u, v)), cop.density(u, v), 1e-12);
}

TEST(NestingCopula, ArchimedeanRequiresTwoBlocks) {
  EXPECT_THROW(NestingCopula({ClassicalFamily::gumbel, 2.0}, 3), ConfigError);
  EXPECT_THROW(NestingCopula({ClassicalFamily::clayton, 1.0}, 4), ConfigError);
  EXPECT_NO_THROW(NestingCopula({ClassicalFamily::frank, 2.0}, 2));
  EXPECT_NO_THROW(NestingCopula({ClassicalFamily::gaussian, 0.3}, 5));
}

TEST(NestingCopula, ExchangeableSamplerPairwiseTau) {
  const NestingCopula nest({ClassicalFamily::gaussian, 0.5}, 3);
  Rng rng(99);
  const Eigen::MatrixXd v = nest.sample(3000, rng);
  const double expected = tau_from_theta(ClassicalFamily::gaussian, 0.5);
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      Eigen::MatrixXd pair(v.rows(), 2);
      pair.col(0) = v.col(a);
      pair.col(1) = v.col(b);
      EXPECT_NEAR(pairwise_tau(pair), expected, 0.05);
    }
  }
}

}  // namespace
}  // namespace vcop
