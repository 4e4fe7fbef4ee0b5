#pragma once

#include <functional>

#include <Eigen/Core>

#include "vcop/special.hpp"

namespace vcop {

/// Componentwise increasing map u_j -> T(u_j) together with its derivative:
/// the gradient of a separable transport potential on the unit cube.
struct ComponentwiseMap {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// Map sending each coordinate through the standard normal quantile. Its
/// derivative 1/phi(Phi^-1(u)) is the diagonal of the potential's Hessian.
inline ComponentwiseMap normal_quantile_map() {
  return {[](double u) { return std_normal_quantile(u); },
          [](double u) { return 1.0 / std_normal_pdf(std_normal_quantile(u)); }};
}

/// Change-of-variables defect det(D^2 psi(u)) * f(grad psi(u)) - m(u) for a
/// separable potential whose gradient acts componentwise. Zero exactly when
/// the map pushes the density m on the cube forward to f. Diagnostic only:
/// evaluated with analytic Jacobians, never solved for psi.
inline double monge_ampere_residual(
    const Eigen::VectorXd& u,
    const std::function<double(const Eigen::VectorXd&)>& density_f,
    const ComponentwiseMap& map,
    const std::function<double(const Eigen::VectorXd&)>& marginal_density) {
  Eigen::VectorXd x(u.size());
  double det = 1.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    x[j] = map.value(u[j]);
    det *= map.derivative(u[j]);
  }
  return det * density_f(x) - marginal_density(u);
}

}  // namespace vcop
