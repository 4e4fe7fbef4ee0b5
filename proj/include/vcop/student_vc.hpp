#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <boost/math/special_functions/gamma.hpp>

#include "vcop/common.hpp"
#include "vcop/elliptical.hpp"
#include "vcop/rng.hpp"
#include "vcop/special.hpp"

namespace vcop {

/// Student-t vector copula: scale matrix, shared tail index, block structure.
struct StudentVCParams {
  Eigen::MatrixXd sigma;
  double nu = 0.0;
  BlockStructure blocks;

  void validate() const {
    detail::require_symmetric_square(sigma, "scale matrix");
    if (sigma.rows() != blocks.total())
      throw ConfigError("scale matrix dimension must match the block structure");
    if (!(nu > 0.0)) throw ConfigError("degrees of freedom must be positive");
    if (Eigen::LLT<Eigen::MatrixXd>(sigma).info() != Eigen::Success)
      throw ConfigError("scale matrix is not positive definite");
  }
};

namespace detail {

/// Log density of the centered multivariate t given a precomputed Cholesky
/// factorization of the scale matrix and its log determinant.
inline double mvt_log_density(const Eigen::VectorXd& x, const Eigen::LLT<Eigen::MatrixXd>& llt,
                              double log_det, double nu) {
  const double m = static_cast<double>(x.size());
  const double quad = x.dot(llt.solve(x));
  return boost::math::lgamma((nu + m) / 2.0) - boost::math::lgamma(nu / 2.0) -
         0.5 * m * std::log(nu * kPi) - 0.5 * log_det -
         0.5 * (nu + m) * std::log1p(quad / nu);
}

}  // namespace detail

/// Cached evaluator: per-block elliptical maps push each block of u to the
/// t scale, where the density is the joint-t over product-of-block-t ratio.
class StudentVC {
 public:
  explicit StudentVC(StudentVCParams params) : params_(std::move(params)) {
    params_.validate();
    llt_.compute(params_.sigma);
    if (llt_.info() != Eigen::Success)
      throw ConfigError("scale matrix is not positive definite");
    log_det_ = 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const auto& blocks = params_.blocks;
    for (int k = 0; k < blocks.count(); ++k) {
      const int off = blocks.offset(k), dk = blocks.dim(k);
      const Eigen::MatrixXd sigma_k = params_.sigma.block(off, off, dk, dk);
      maps_.emplace_back(RadialSpec::student_radial(dk, params_.nu), sigma_k);
      block_llt_.emplace_back();
      block_llt_.back().compute(sigma_k);
      if (block_llt_.back().info() != Eigen::Success)
        throw ConfigError("scale matrix diagonal block is not positive definite");
      block_log_det_.push_back(
          2.0 * block_llt_.back().matrixL().toDenseMatrix().diagonal().array().log().sum());
    }
  }

  const StudentVCParams& params() const { return params_; }
  int dim() const { return params_.blocks.total(); }

  double log_density(const Eigen::VectorXd& u) const {
    if (u.size() != dim()) throw ConfigError("point has wrong dimension");
    const auto& blocks = params_.blocks;
    Eigen::VectorXd x(dim());
    double block_terms = 0.0;
    for (int k = 0; k < blocks.count(); ++k) {
      const int off = blocks.offset(k), dk = blocks.dim(k);
      const Eigen::VectorXd xk = maps_[static_cast<std::size_t>(k)].forward(u.segment(off, dk));
      x.segment(off, dk) = xk;
      block_terms += detail::mvt_log_density(xk, block_llt_[static_cast<std::size_t>(k)],
                                             block_log_det_[static_cast<std::size_t>(k)],
                                             params_.nu);
    }
    return detail::mvt_log_density(x, llt_, log_det_, params_.nu) - block_terms;
  }

  double density(const Eigen::VectorXd& u) const { return std::exp(log_density(u)); }

  /// Z ~ N(0, Sigma), W ~ inverse-gamma(nu/2, nu/2), Y = sqrt(W) Z, then each
  /// block returns to the cube through its own inverse elliptical map.
  Eigen::MatrixXd sample(int n, Rng& rng) const {
    if (n < 1) throw ConfigError("sample size must be positive");
    const Eigen::MatrixXd chol = llt_.matrixL();
    const auto& blocks = params_.blocks;
    Eigen::MatrixXd out(n, dim());
    Eigen::VectorXd z(dim());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < dim(); ++j) z[j] = rng.normal();
      const double w = sample_inverse_gamma(params_.nu / 2.0, params_.nu / 2.0, rng);
      const Eigen::VectorXd y = std::sqrt(w) * (chol * z);
      for (int k = 0; k < blocks.count(); ++k) {
        const int off = blocks.offset(k), dk = blocks.dim(k);
        out.row(i).segment(off, dk) =
            maps_[static_cast<std::size_t>(k)].inverse(y.segment(off, dk)).transpose();
      }
    }
    return out;
  }

 private:
  StudentVCParams params_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
  std::vector<EllipticalMap> maps_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> block_llt_;
  std::vector<double> block_log_det_;
};

inline double student_vc_density(const Eigen::VectorXd& u, const StudentVCParams& params) {
  return StudentVC(params).density(u);
}

inline Eigen::MatrixXd student_vc_sample(const StudentVCParams& params, int n, Rng& rng) {
  return StudentVC(params).sample(n, rng);
}

}  // namespace vcop
