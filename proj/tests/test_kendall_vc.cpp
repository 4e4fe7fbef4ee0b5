#include <cmath>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vcop/classical.hpp"
#include "vcop/kendall_vc.hpp"
#include "vcop/rng.hpp"
#include "vcop/special.hpp"

namespace vcop {
namespace {

using testing::ks_uniform;
using testing::pairwise_tau;

KendallVCParams clayton21(double theta) {
  return {NestingCopulaSpec{ClassicalFamily::clayton, theta}, BlockStructure({2, 1})};
}

TEST(KendallVcDensity, RadialLevelAnchor) {
  // K_2(0.25) = radial_cdf(ln 0.25, 2) for the product of two uniforms
  EXPECT_NEAR(radial_cdf(std::log(0.25), 2), 0.596573590279973, 1e-12);
  EXPECT_NEAR(radial_cdf(std::log(0.25), 1), 0.25, 1e-14);
}

TEST(KendallVcDensity, ClaytonBlockAnchor) {
  EXPECT_NEAR(kendall_vc_density(Eigen::Vector3d(0.5, 0.5, 0.5), clayton21(2.0)),
              1.389377920942509, 1e-12);
}

TEST(KendallVcDensity, IndependenceNestingGivesUnitDensity) {
  const KendallVC vc({NestingCopulaSpec{}, BlockStructure({2, 2})});
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd u(4);
    for (int j = 0; j < 4; ++j) u[j] = rng.uniform();
    EXPECT_NEAR(vc.density(u), 1.0, 1e-12);
  }
}

TEST(KendallVcDensity, SingleCoordinateBlocksReduceToNestingCopula) {
  // with d_k = 1 the radial level is the coordinate itself
  const KendallVC vc(
      {NestingCopulaSpec{ClassicalFamily::frank, 4.0}, BlockStructure({1, 1})});
  const ClassicalCopula cop(ClassicalFamily::frank, 4.0);
  Rng rng(11);
  for (int i = 0; i < 25; ++i) {
    const double u = rng.uniform(), v = rng.uniform();
    EXPECT_NEAR(vc.density(Eigen::Vector2d(u, v)), cop.density(u, v), 1e-12);
  }
}

TEST(KendallVcDensity, McNormalization) {
  const KendallVC vc(clayton21(2.0));
  Rng rng(23);
  const int n = 200000;
  double total = 0.0;
  Eigen::VectorXd u(3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) u[j] = rng.uniform();
    total += vc.density(u);
  }
  EXPECT_NEAR(total / n, 1.0, 0.02);
}

TEST(KendallVcSampler, RadialLevelsFollowNestingCopula) {
  // pushing samples through the radial level map must recover the nesting law:
  // uniform margins and the nesting copula's Kendall tau
  const double theta = 2.0;  // Clayton tau = 0.5
  const KendallVC vc(clayton21(theta));
  Rng rng(301);
  const Eigen::MatrixXd u = vc.sample(6000, rng);
  Eigen::MatrixXd levels(u.rows(), 2);
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const Eigen::VectorXd v = vc.radial_levels(u.row(i).transpose());
    levels(i, 0) = v[0];
    levels(i, 1) = v[1];
  }
  const double bound = 1.63 / std::sqrt(6000.0);
  EXPECT_LT(ks_uniform(levels.col(0)), bound);
  EXPECT_LT(ks_uniform(levels.col(1)), bound);
  EXPECT_NEAR(pairwise_tau(levels), tau_from_theta(ClassicalFamily::clayton, theta), 0.05);
}

TEST(KendallVcSampler, DeterministicWithUniformMargins) {
  const KendallVC vc(clayton21(2.0));
  Rng rng1(88), rng2(88);
  const Eigen::MatrixXd a = vc.sample(8000, rng1);
  const Eigen::MatrixXd b = vc.sample(8000, rng2);
  EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
  const double bound = 1.63 / std::sqrt(8000.0);
  for (int j = 0; j < 3; ++j) EXPECT_LT(ks_uniform(a.col(j)), bound) << "coordinate " << j;
}

TEST(KendallVcSampler, WithinBlockCoordinatesAreIndependent) {
  // block marginals are uniform on the cube: the shared radius plus simplex
  // split reproduces iid uniforms within a block, so within-block tau is zero
  const KendallVC vc(clayton21(2.0));
  Rng rng(404);
  const Eigen::MatrixXd u = vc.sample(6000, rng);
  EXPECT_NEAR(pairwise_tau(u.leftCols(2)), 0.0, 0.03);
  EXPECT_NEAR((u.col(0).array() * u.col(1).array()).mean(), 0.25, 0.01);
}

}  // namespace
}  // namespace vcop
