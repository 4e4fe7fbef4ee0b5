#include <gtest/gtest.h>

#include "vcop/estimation.hpp"
#include "vcop/kendall_vc.hpp"
#include "vcop/model.hpp"
#include "vcop/special.hpp"
#include "vcop/transport.hpp"

namespace {

using namespace vcop;

/// Applies strictly increasing margins so the copula is untouched but the
/// observed scale is arbitrary: normal quantile, then a per-column affine map.
Eigen::MatrixXd disguise_margins(const Eigen::MatrixXd& u) {
  Eigen::MatrixXd x(u.rows(), u.cols());
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    const double scale = 1.0 + 0.5 * static_cast<double>(j);
    const double shift = 10.0 * static_cast<double>(j) - 3.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i)
      x(i, j) = shift + scale * std_normal_quantile(u(i, j));
  }
  return x;
}

Eigen::MatrixXd pipeline_ranks(const Eigen::MatrixXd& x, const BlockStructure& blocks,
                               std::uint64_t seed) {
  Eigen::MatrixXd ranks(x.rows(), x.cols());
  for (int k = 0; k < blocks.count(); ++k) {
    const ObservationMatrix obs(x.middleCols(blocks.offset(k), blocks.dim(k)));
    const RankGrid grid = make_grid(obs.n(), blocks.dim(k), GridScheme::halton,
                                    Rng::derive(seed, static_cast<std::uint64_t>(k)));
    ranks.middleCols(blocks.offset(k), blocks.dim(k)) = empirical_vector_ranks(obs, grid);
  }
  return ranks;
}

/// Data with unknown margins -> vector ranks -> radial levels -> nesting fit
/// recovers the between-block dependence for every family and strength.
TEST(EndToEndRecovery, AllFamiliesAcrossTauLevels) {
  const BlockStructure blocks({2, 2});
  const int n = 1500;
  const std::vector<ClassicalFamily> families = {ClassicalFamily::clayton,
                                                 ClassicalFamily::frank,
                                                 ClassicalFamily::gaussian,
                                                 ClassicalFamily::gumbel};
  const std::vector<double> taus = {0.2, 0.5, 0.7};
  std::uint64_t seed = 52000;
  for (const auto family : families) {
    for (const double tau : taus) {
      ++seed;
      const KendallVCParams params{{family, theta_from_tau(family, tau)}, blocks};
      Rng rng(seed);
      const Eigen::MatrixXd u = kendall_vc_sample(params, n, rng);
      const Eigen::MatrixXd x = disguise_margins(u);
      const Eigen::MatrixXd ranks = pipeline_ranks(x, blocks, seed);
      const Eigen::MatrixXd v = kendall_transform({blocks, ranks});
      const NestingFit fit = fit_nesting_copula(v, family);
      EXPECT_NEAR(fit.mle.tau, tau, 0.05)
          << to_string(family) << " tau=" << tau << " seed=" << seed;
      EXPECT_NEAR(fit.tau_inversion.tau, tau, 0.05)
          << to_string(family) << " tau=" << tau << " seed=" << seed;
    }
  }
}

/// Vector ranks only see the copula: per-block positive affine maps leave the
/// optimal assignment bit for bit unchanged.
TEST(EndToEndInvariance, PerBlockAffineMapsPreserveRanks) {
  const BlockStructure blocks({2, 1});
  for (const std::uint64_t seed : {901u, 902u, 903u}) {
    Rng rng(seed);
    const int n = 300;
    Eigen::MatrixXd y(n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 3; ++j) y(i, j) = rng.normal() + 0.8 * rng.exponential();

    Eigen::MatrixXd z = y;
    z.leftCols(2) = (2.5 * y.leftCols(2)).array() - 7.0;
    z.col(2) = (0.03 * y.col(2)).array() + 400.0;

    for (int k = 0; k < blocks.count(); ++k) {
      const Eigen::Index off = blocks.offset(k), dk = blocks.dim(k);
      const RankGrid grid = make_grid(n, static_cast<int>(dk), GridScheme::halton, seed);
      const VectorRankAssignment base =
          assign_vector_ranks(ObservationMatrix(y.middleCols(off, dk)), grid);
      const VectorRankAssignment mapped =
          assign_vector_ranks(ObservationMatrix(z.middleCols(off, dk)), grid);
      EXPECT_EQ(base.permutation, mapped.permutation) << "seed=" << seed << " block=" << k;
    }
  }
}

/// The fitted dependence report is therefore identical on raw and rescaled
/// data.
TEST(EndToEndInvariance, FitsAreIdenticalAfterRescaling) {
  const BlockStructure blocks({2, 2});
  const KendallVCParams params{{ClassicalFamily::gumbel, 2.0}, blocks};
  Rng rng(777);
  const Eigen::MatrixXd u = kendall_vc_sample(params, 800, rng);
  const Eigen::MatrixXd x = disguise_margins(u);
  Eigen::MatrixXd x2 = x;
  x2.leftCols(2) = (3.0 * x.leftCols(2)).array() + 100.0;
  x2.rightCols(2) = (0.01 * x.rightCols(2)).array() - 5.0;

  const Eigen::MatrixXd r1 = pipeline_ranks(x, blocks, 31);
  const Eigen::MatrixXd r2 = pipeline_ranks(x2, blocks, 31);
  EXPECT_EQ(r1, r2);

  const NestingFit f1 = fit_nesting_copula(kendall_transform({blocks, r1}),
                                           ClassicalFamily::gumbel);
  const NestingFit f2 = fit_nesting_copula(kendall_transform({blocks, r2}),
                                           ClassicalFamily::gumbel);
  EXPECT_EQ(f1.mle.theta, f2.mle.theta);
  EXPECT_EQ(f1.tau_inversion.theta, f2.tau_inversion.theta);
  EXPECT_NEAR(f1.mle.tau, 0.5, 0.06);
}

/// Method of moments on the Gaussian vector copula survives the same
/// end-to-end path: simulate, disguise margins, rank, fit.
TEST(EndToEndRecovery, GaussianVectorCopulaCrossBlock) {
  const BlockStructure blocks({2, 1});
  Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(3, 3);
  omega(0, 2) = omega(2, 0) = 0.6;
  omega(1, 2) = omega(2, 1) = 0.6;
  const GaussianVCParams params{omega, blocks};
  Rng rng(4242);
  const Eigen::MatrixXd u = gaussian_vc_sample(params, 4000, rng);
  const Eigen::MatrixXd x = disguise_margins(u);
  const Eigen::MatrixXd ranks = pipeline_ranks(x, blocks, 17);
  const GaussianVCParams fit = fit_gaussian_vc_mom({blocks, ranks});
  EXPECT_NEAR(fit.omega(0, 2), 0.6, 0.05);
  EXPECT_NEAR(fit.omega(1, 2), 0.6, 0.05);
  EXPECT_EQ(fit.omega(0, 1), 0.0);
}

}  // namespace
