#pragma once

#include <cmath>

#include <Eigen/Core>

#include "vcop/classical.hpp"
#include "vcop/common.hpp"
#include "vcop/rng.hpp"
#include "vcop/special.hpp"

namespace vcop {

/// Kendall vector copula: block radial levels coupled by a nesting copula.
struct KendallVCParams {
  NestingCopulaSpec nesting;
  BlockStructure blocks;

  void validate() const {
    const NestingCopula check(nesting, blocks.count());
    (void)check;
  }
};

/// Cached evaluator. The density at u is the nesting density at the radial
/// levels F_R(sum of block log-coordinates); the sampler draws the levels
/// from the nesting copula, maps them to log-radii, and spreads each radius
/// over its block with an independent uniform simplex weight vector.
class KendallVC {
 public:
  explicit KendallVC(KendallVCParams params)
      : params_(std::move(params)), nesting_(params_.nesting, params_.blocks.count()) {}

  const KendallVCParams& params() const { return params_; }
  int dim() const { return params_.blocks.total(); }

  /// Radial levels V_k = F_R(log of the block coordinate product) in [0,1]^K.
  Eigen::VectorXd radial_levels(const Eigen::VectorXd& u) const {
    if (u.size() != dim()) throw ConfigError("point has wrong dimension");
    const auto& blocks = params_.blocks;
    Eigen::VectorXd v(blocks.count());
    for (int k = 0; k < blocks.count(); ++k) {
      double log_prod = 0.0;
      for (int j = 0; j < blocks.dim(k); ++j)
        log_prod += std::log(clamp_unit(u[blocks.offset(k) + j]));
      v[k] = radial_cdf(log_prod, blocks.dim(k));
    }
    return v;
  }

  double log_density(const Eigen::VectorXd& u) const {
    return nesting_.log_density(radial_levels(u));
  }

  double density(const Eigen::VectorXd& u) const { return std::exp(log_density(u)); }

  Eigen::MatrixXd sample(int n, Rng& rng) const {
    if (n < 1) throw ConfigError("sample size must be positive");
    const auto& blocks = params_.blocks;
    const Eigen::MatrixXd levels = nesting_.sample(n, rng);
    Eigen::MatrixXd out(n, dim());
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < blocks.count(); ++k) {
        const int dk = blocks.dim(k);
        const double log_radius = radial_quantile(levels(i, k), dk);
        const auto weights = sample_simplex(dk, rng);
        for (int j = 0; j < dk; ++j)
          out(i, blocks.offset(k) + j) = std::exp(log_radius * weights[static_cast<std::size_t>(j)]);
      }
    }
    return out;
  }

 private:
  KendallVCParams params_;
  NestingCopula nesting_;
};

inline double kendall_vc_density(const Eigen::VectorXd& u, const KendallVCParams& params) {
  return KendallVC(params).density(u);
}

inline Eigen::MatrixXd kendall_vc_sample(const KendallVCParams& params, int n, Rng& rng) {
  return KendallVC(params).sample(n, rng);
}

}  // namespace vcop
