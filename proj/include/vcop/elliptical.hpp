#pragma once

#include <cmath>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "vcop/common.hpp"
#include "vcop/special.hpp"

namespace vcop {

/// Radial law of an elliptical target: the chi distribution with dim degrees
/// of freedom (Gaussian target), or Q with Q^2/dim ~ F(dim, nu) (Student-t
/// target with nu degrees of freedom).
struct RadialSpec {
  enum class Kind { chi, student_q };

  Kind kind = Kind::chi;
  int dim = 1;
  double nu = 0.0;

  static RadialSpec chi_radial(int dim) { return {Kind::chi, dim, 0.0}; }
  static RadialSpec student_radial(int dim, double nu) { return {Kind::student_q, dim, nu}; }

  void validate() const {
    if (dim < 1) throw ConfigError("radial dimension must be positive");
    if (kind == Kind::student_q && !(nu > 0.0))
      throw ConfigError("student radial requires positive degrees of freedom");
  }

  double cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (kind == Kind::chi) return chi_cdf(x, dim);
    return f_cdf(x * x / dim, static_cast<double>(dim), nu);
  }

  double quantile(double p) const {
    if (kind == Kind::chi) return chi_quantile(p, dim);
    return std::sqrt(dim * f_quantile(p, static_cast<double>(dim), nu));
  }
};

namespace detail {

inline void require_symmetric_square(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw ConfigError(std::string(what) + " must be a nonempty square matrix");
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ConfigError(std::string(what) + " must be symmetric");
}

}  // namespace detail

/// Symmetric positive-definite square root via eigendecomposition.
inline Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& sigma) {
  detail::require_symmetric_square(sigma, "scale matrix");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of scale matrix failed");
  const Eigen::VectorXd& ev = eig.eigenvalues();
  if (ev.minCoeff() <= 1e-12 * std::max(1.0, ev.maxCoeff()))
    throw ConfigError("scale matrix is not positive definite");
  return eig.eigenvectors() * ev.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
}

/// Inverse of symmetric_sqrt, from the same eigendecomposition.
inline Eigen::MatrixXd symmetric_inv_sqrt(const Eigen::MatrixXd& sigma) {
  detail::require_symmetric_square(sigma, "scale matrix");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of scale matrix failed");
  const Eigen::VectorXd& ev = eig.eigenvalues();
  if (ev.minCoeff() <= 1e-12 * std::max(1.0, ev.maxCoeff()))
    throw ConfigError("scale matrix is not positive definite");
  return eig.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

/// Measure transport between the uniform cube and an elliptical law,
/// composed as componentwise normal quantile -> radial re-scaling ->
/// linear correlation. The radius in the middle leg follows chi(dim) on the
/// source side, so a chi radial makes the scaling the identity.
class EllipticalMap {
 public:
  EllipticalMap(const RadialSpec& radial, const Eigen::MatrixXd& sigma)
      : radial_(radial), sqrt_(symmetric_sqrt(sigma)), inv_sqrt_(symmetric_inv_sqrt(sigma)) {
    radial_.validate();
    if (radial_.dim != sigma.rows())
      throw ConfigError("radial dimension must match the scale matrix");
  }

  int dim() const { return radial_.dim; }
  const RadialSpec& radial() const { return radial_; }

  /// T(u): uniform cube to the elliptical law. Degenerate points with
  /// ||quantile(u)|| below 1e-12 map to the origin (the continuous limit).
  Eigen::VectorXd forward(const Eigen::VectorXd& u) const {
    if (u.size() != dim()) throw ConfigError("point has wrong dimension");
    Eigen::VectorXd z(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) z[i] = std_normal_quantile(clamp_unit(u[i]));
    const double r = z.norm();
    if (r < 1e-12) return Eigen::VectorXd::Zero(u.size());
    const double scaled = radial_.quantile(chi_cdf(r, dim()));
    return (scaled / r) * (sqrt_ * z);
  }

  /// T*(y): elliptical law back to the cube; the inverse of forward on
  /// interior points. y = 0 maps to the cube center.
  Eigen::VectorXd inverse(const Eigen::VectorXd& y) const {
    if (y.size() != dim()) throw ConfigError("point has wrong dimension");
    const Eigen::VectorXd v = inv_sqrt_ * y;
    const double r = v.norm();
    if (r < 1e-12) return Eigen::VectorXd::Constant(y.size(), 0.5);
    const double scaled = chi_quantile(radial_.cdf(r), dim());
    Eigen::VectorXd u(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) u[i] = std_normal_cdf(scaled / r * v[i]);
    return u;
  }

 private:
  RadialSpec radial_;
  Eigen::MatrixXd sqrt_;
  Eigen::MatrixXd inv_sqrt_;
};

inline Eigen::VectorXd elliptical_mt_forward(const Eigen::VectorXd& u, const RadialSpec& radial,
                                             const Eigen::MatrixXd& sigma) {
  return EllipticalMap(radial, sigma).forward(u);
}

inline Eigen::VectorXd elliptical_mt_inverse(const Eigen::VectorXd& y, const RadialSpec& radial,
                                             const Eigen::MatrixXd& sigma) {
  return EllipticalMap(radial, sigma).inverse(y);
}

}  // namespace vcop
