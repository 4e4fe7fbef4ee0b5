#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "vcop/common.hpp"

namespace vcop {

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kPi = 3.14159265358979323846;

/// Standard normal CDF; saturates to 0/1 in the far tails.
inline double std_normal_cdf(double x) {
  return 0.5 * boost::math::erfc(-x / kSqrt2);
}

inline double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

inline double std_normal_log_pdf(double x) {
  return -0.5 * x * x - 0.5 * std::log(2.0 * kPi);
}

/// Standard normal quantile. Inputs are clamped to [1e-12, 1 - 1e-12] so the
/// result is always finite; values outside [0, 1] are rejected.
inline double std_normal_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError("normal quantile requires p in [0, 1]");
  p = clamp_unit(p);
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

/// CDF of the chi distribution with d degrees of freedom (the norm of a
/// d-dimensional standard normal): regularized lower incomplete gamma.
inline double chi_cdf(double x, int d) {
  if (d < 1) throw ConfigError("chi distribution requires d >= 1");
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * d, 0.5 * x * x);
}

inline double chi_quantile(double p, int d) {
  if (d < 1) throw ConfigError("chi distribution requires d >= 1");
  if (!(p >= 0.0 && p < 1.0)) {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw ConfigError("chi quantile requires p in [0, 1]");
  }
  if (p == 0.0) return 0.0;
  return std::sqrt(2.0 * boost::math::gamma_p_inv(0.5 * d, p));
}

/// CDF of the F(d1, d2) distribution via the regularized incomplete beta.
inline double f_cdf(double x, double d1, double d2) {
  if (d1 <= 0.0 || d2 <= 0.0) throw ConfigError("F distribution requires positive degrees of freedom");
  if (x <= 0.0) return 0.0;
  const double y = d1 * x / (d1 * x + d2);
  return boost::math::ibeta(0.5 * d1, 0.5 * d2, y);
}

inline double f_quantile(double p, double d1, double d2) {
  if (d1 <= 0.0 || d2 <= 0.0) throw ConfigError("F distribution requires positive degrees of freedom");
  if (!(p >= 0.0 && p < 1.0)) {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw ConfigError("F quantile requires p in [0, 1]");
  }
  if (p == 0.0) return 0.0;
  const double y = boost::math::ibeta_inv(0.5 * d1, 0.5 * d2, p);
  return d2 * y / (d1 * (1.0 - y));
}

/// CDF on (-inf, 0] of the log-product radial variable R = ln(U_1 ... U_d),
/// U_j iid uniform: F_R(x) = e^x Sum_{j<d} (-x)^j / j!. Since -R ~ Gamma(d, 1)
/// this equals the regularized upper incomplete gamma Q(d, -x), which is how
/// it is evaluated.
inline double radial_cdf(double x, int d) {
  if (d < 1) throw ConfigError("radial distribution requires d >= 1");
  if (x > 0.0) throw ConfigError("radial CDF is defined on x <= 0");
  if (x == 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(d), -x);
}

/// Inverse of radial_cdf; returns a nonpositive real.
inline double radial_quantile(double p, int d) {
  if (d < 1) throw ConfigError("radial distribution requires d >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("radial quantile requires p in [0, 1]");
  if (p >= 1.0) return 0.0;
  p = std::max(p, kUnitEps);
  return -boost::math::gamma_q_inv(static_cast<double>(d), p);
}

/// Kendall distribution function of d independent uniforms:
/// K_d(u) = u Sum_{i<d} (log(1/u))^i / i!, the CDF of the product U_1...U_d.
/// Kept as an explicit series, independent of radial_cdf's gamma evaluation.
inline double kendall_indep_dist(double u, int d) {
  if (d < 1) throw ConfigError("Kendall distribution requires d >= 1");
  if (!(u >= 0.0 && u <= 1.0)) throw ConfigError("Kendall distribution requires u in [0, 1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  const double t = std::log(1.0 / u);
  double term = 1.0;
  double sum = 1.0;
  for (int i = 1; i < d; ++i) {
    term *= t / static_cast<double>(i);
    sum += term;
  }
  return u * sum;
}

/// log(e^a + e^b) without overflow; tolerates -infinity arguments.
inline double log_sum_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

namespace detail {

/// Nodes/weights of 16-point Gauss-Legendre on [-1, 1] (positive half; the
/// rule is symmetric).
inline const double kGl16Nodes[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline const double kGl16Weights[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <typename F>
double gl16(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kGl16Nodes[i];
    s += kGl16Weights[i] * (f(c - dx) + f(c + dx));
  }
  return s * h;
}

/// Adaptive Gauss-Legendre: bisect until the two-panel refinement agrees with
/// the single panel to the requested relative tolerance.
template <typename F>
double adaptive_gl(F&& f, double a, double b, double rel_tol, int depth = 0) {
  const double whole = gl16(f, a, b);
  const double mid = 0.5 * (a + b);
  const double split = gl16(f, a, mid) + gl16(f, mid, b);
  if (depth >= 24 || std::abs(split - whole) <= rel_tol * (std::abs(split) + 1e-300))
    return split;
  return adaptive_gl(f, a, mid, rel_tol, depth + 1) +
         adaptive_gl(f, mid, b, rel_tol, depth + 1);
}

}  // namespace detail

/// Debye function D_1(x) = (1/x) Integral_0^x t/(e^t - 1) dt, for x != 0;
/// adaptive Gauss-Legendre with relative tolerance 1e-10, series near 0.
inline double debye1(double x) {
  if (x == 0.0) return 1.0;
  if (std::abs(x) < 1e-4) {
    // t/(e^t - 1) = 1 - t/2 + t^2/12 - t^4/720 + ...
    return 1.0 - x / 4.0 + x * x / 36.0;
  }
  const auto integrand = [](double t) {
    if (std::abs(t) < 1e-8) return 1.0 - 0.5 * t;
    return t / std::expm1(t);
  };
  return detail::adaptive_gl(integrand, 0.0, x, 1e-10) / x;
}

}  // namespace vcop
