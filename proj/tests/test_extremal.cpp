#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vcop/extremal.hpp"
#include "vcop/rng.hpp"

namespace vcop {
namespace {

using testing::ks_uniform;

TEST(ExtremalCdf, KindParsingRoundTrips) {
  for (const auto kind : {ExtremalKind::independence, ExtremalKind::comonotonic,
                          ExtremalKind::countermonotonic}) {
    EXPECT_EQ(parse_extremal_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_extremal_kind("monotonic"), ConfigError);
}

TEST(ExtremalCdf, AnchorValues) {
  const std::vector<Eigen::VectorXd> u = {Eigen::Vector2d(0.5, 0.6), Eigen::Vector2d(0.7, 0.5)};
  EXPECT_NEAR(extremal_cdf(u, ExtremalKind::independence), 0.5 * 0.6 * 0.7 * 0.5, 1e-15);
  EXPECT_NEAR(extremal_cdf(u, ExtremalKind::comonotonic), 0.5 * 0.5, 1e-15);
  // countermonotonic: max(0.5 + 0.7 - 1, 0) * max(0.6 + 0.5 - 1, 0)
  EXPECT_NEAR(extremal_cdf(u, ExtremalKind::countermonotonic), 0.2 * 0.1, 1e-15);
}

TEST(ExtremalCdf, FlatOverloadMatchesBlockOverload) {
  Eigen::VectorXd flat(4);
  flat << 0.5, 0.6, 0.7, 0.5;
  const BlockStructure blocks({2, 2});
  const std::vector<Eigen::VectorXd> u = {flat.head(2), flat.tail(2)};
  for (const auto kind : {ExtremalKind::independence, ExtremalKind::comonotonic,
                          ExtremalKind::countermonotonic}) {
    EXPECT_EQ(extremal_cdf(flat, blocks, kind), extremal_cdf(u, kind));
  }
}

TEST(ExtremalCdf, ValidationRejectsBadInputs) {
  const std::vector<Eigen::VectorXd> unequal = {Eigen::Vector2d(0.5, 0.5),
                                                Eigen::VectorXd::Constant(3, 0.5)};
  EXPECT_THROW(extremal_cdf(unequal, ExtremalKind::comonotonic), ConfigError);
  EXPECT_NO_THROW(extremal_cdf(unequal, ExtremalKind::independence));

  const std::vector<Eigen::VectorXd> three = {Eigen::Vector2d(0.5, 0.5),
                                              Eigen::Vector2d(0.5, 0.5),
                                              Eigen::Vector2d(0.5, 0.5)};
  EXPECT_THROW(extremal_cdf(three, ExtremalKind::countermonotonic), ConfigError);
  EXPECT_NO_THROW(extremal_cdf(three, ExtremalKind::comonotonic));

  const std::vector<Eigen::VectorXd> bad = {Eigen::Vector2d(0.5, 1.5), Eigen::Vector2d(0.5, 0.5)};
  EXPECT_THROW(extremal_cdf(bad, ExtremalKind::independence), ConfigError);
}

TEST(ExtremalSampler, ComonotonicRepeatsBlockAndIsUniform) {
  Rng rng(7);
  const Eigen::MatrixXd u = extremal_sample(ExtremalKind::comonotonic, BlockStructure({2, 2}), 6000, rng);
  ASSERT_EQ(u.cols(), 4);
  EXPECT_EQ((u.col(0) - u.col(2)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((u.col(1) - u.col(3)).cwiseAbs().maxCoeff(), 0.0);
  const double bound = 1.63 / std::sqrt(6000.0);
  EXPECT_LT(ks_uniform(u.col(0)), bound);
  EXPECT_LT(ks_uniform(u.col(1)), bound);
}

TEST(ExtremalSampler, CountermonotonicReflectsBlock) {
  Rng rng(7);
  const Eigen::MatrixXd u =
      extremal_sample(ExtremalKind::countermonotonic, BlockStructure({2, 2}), 6000, rng);
  EXPECT_EQ((u.col(2).array() - (1.0 - u.col(0).array())).abs().maxCoeff(), 0.0);
  EXPECT_EQ((u.col(3).array() - (1.0 - u.col(1).array())).abs().maxCoeff(), 0.0);
  const double bound = 1.63 / std::sqrt(6000.0);
  EXPECT_LT(ks_uniform(u.col(2)), bound);
}

TEST(ExtremalSampler, IndependenceBlocksAreUncorrelated) {
  Rng rng(13);
  const Eigen::MatrixXd u =
      extremal_sample(ExtremalKind::independence, BlockStructure({2, 1}), 10000, rng);
  EXPECT_NEAR((u.col(0).array() * u.col(2).array()).mean(), 0.25, 0.01);
  const double bound = 1.63 / std::sqrt(10000.0);
  for (int j = 0; j < 3; ++j) EXPECT_LT(ks_uniform(u.col(j)), bound);
}

TEST(ExtremalSampler, RejectsInvalidShapes) {
  Rng rng(1);
  EXPECT_THROW(extremal_sample(ExtremalKind::comonotonic, BlockStructure({2, 3}), 10, rng),
               ConfigError);
  EXPECT_THROW(extremal_sample(ExtremalKind::countermonotonic, BlockStructure({2, 2, 2}), 10, rng),
               ConfigError);
}

}  // namespace
}  // namespace vcop
