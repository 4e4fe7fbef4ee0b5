#pragma once

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "vcop/common.hpp"
#include "vcop/elliptical.hpp"
#include "vcop/rng.hpp"
#include "vcop/special.hpp"

namespace vcop {

/// Gaussian vector copula: correlation matrix with identity diagonal blocks,
/// so each block marginal is exactly uniform on its cube.
struct GaussianVCParams {
  Eigen::MatrixXd omega;
  BlockStructure blocks;

  void validate() const {
    detail::require_symmetric_square(omega, "correlation matrix");
    if (omega.rows() != blocks.total())
      throw ConfigError("correlation matrix dimension must match the block structure");
    if (omega.cwiseAbs().maxCoeff() > 1.0 + 1e-12)
      throw ConfigError("correlation entries must lie in [-1,1]");
    for (int k = 0; k < blocks.count(); ++k) {
      const int off = blocks.offset(k), dk = blocks.dim(k);
      if ((omega.block(off, off, dk, dk) - Eigen::MatrixXd::Identity(dk, dk))
              .cwiseAbs()
              .maxCoeff() > 1e-12)
        throw ConfigError("diagonal blocks of the correlation matrix must be identity");
    }
    if (Eigen::LLT<Eigen::MatrixXd>(omega).info() != Eigen::Success)
      throw ConfigError("correlation matrix is not positive definite");
  }
};

/// Cached evaluator: density in log space through one Cholesky factor, and
/// the linear sampler Z -> Omega^{1/2} Z -> componentwise normal CDF.
class GaussianVC {
 public:
  explicit GaussianVC(GaussianVCParams params) : params_(std::move(params)) {
    params_.validate();
    llt_.compute(params_.omega);
    if (llt_.info() != Eigen::Success)
      throw ConfigError("correlation matrix is not positive definite");
    log_det_ = 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }

  const GaussianVCParams& params() const { return params_; }
  int dim() const { return params_.blocks.total(); }

  double log_density(const Eigen::VectorXd& u) const {
    if (u.size() != dim()) throw ConfigError("point has wrong dimension");
    Eigen::VectorXd x(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) x[i] = std_normal_quantile(clamp_unit(u[i]));
    const double quad = x.dot(llt_.solve(x));
    return -0.5 * log_det_ - 0.5 * (quad - x.squaredNorm());
  }

  double density(const Eigen::VectorXd& u) const { return std::exp(log_density(u)); }

  Eigen::MatrixXd sample(int n, Rng& rng) const {
    if (n < 1) throw ConfigError("sample size must be positive");
    const Eigen::MatrixXd chol = llt_.matrixL();
    Eigen::MatrixXd out(n, dim());
    Eigen::VectorXd z(dim());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < dim(); ++j) z[j] = rng.normal();
      const Eigen::VectorXd y = chol * z;
      for (int j = 0; j < dim(); ++j) out(i, j) = std_normal_cdf(y[j]);
    }
    return out;
  }

 private:
  GaussianVCParams params_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
};

inline double gaussian_vc_density(const Eigen::VectorXd& u, const GaussianVCParams& params) {
  return GaussianVC(params).density(u);
}

inline Eigen::MatrixXd gaussian_vc_sample(const GaussianVCParams& params, int n, Rng& rng) {
  return GaussianVC(params).sample(n, rng);
}

}  // namespace vcop
