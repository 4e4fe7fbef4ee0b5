#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <boost/math/special_functions/owens_t.hpp>

#include "vcop/common.hpp"
#include "vcop/rng.hpp"
#include "vcop/special.hpp"

namespace vcop {

enum class ClassicalFamily { clayton, frank, gumbel, gaussian, independence };

inline std::string to_string(ClassicalFamily family) {
  switch (family) {
    case ClassicalFamily::clayton: return "clayton";
    case ClassicalFamily::frank: return "frank";
    case ClassicalFamily::gumbel: return "gumbel";
    case ClassicalFamily::gaussian: return "gaussian";
    case ClassicalFamily::independence: return "independence";
  }
  throw ConfigError("unknown classical family");
}

inline ClassicalFamily parse_classical_family(const std::string& name) {
  if (name == "clayton") return ClassicalFamily::clayton;
  if (name == "frank") return ClassicalFamily::frank;
  if (name == "gumbel") return ClassicalFamily::gumbel;
  if (name == "gaussian") return ClassicalFamily::gaussian;
  if (name == "independence") return ClassicalFamily::independence;
  throw ConfigError("unknown copula family '" + name +
                    "' (expected clayton, frank, gumbel, gaussian, or independence)");
}

/// Admissible parameter ranges: Clayton [-1,inf)\{0}, Frank R\{0},
/// Gumbel [1,inf), Gaussian (-1,1), independence ignores theta.
inline void validate_classical_theta(ClassicalFamily family, double theta) {
  if (!std::isfinite(theta)) throw ConfigError("copula parameter must be finite");
  switch (family) {
    case ClassicalFamily::clayton:
      if (theta < -1.0 || theta == 0.0)
        throw ConfigError("clayton parameter must lie in [-1,inf) excluding 0");
      return;
    case ClassicalFamily::frank:
      if (theta == 0.0) throw ConfigError("frank parameter must be nonzero");
      return;
    case ClassicalFamily::gumbel:
      if (theta < 1.0) throw ConfigError("gumbel parameter must lie in [1,inf)");
      return;
    case ClassicalFamily::gaussian:
      if (theta <= -1.0 || theta >= 1.0)
        throw ConfigError("gaussian correlation must lie in (-1,1)");
      return;
    case ClassicalFamily::independence:
      return;
  }
}

namespace detail {

/// Kendall's tau of the Frank copula: 1 - 4(1 - D1(theta))/theta, with the
/// odd small-parameter series below 1e-7 where the closed form cancels.
inline double frank_tau(double theta) {
  if (std::abs(theta) < 1e-7) {
    const double t2 = theta * theta;
    return theta * (1.0 / 9.0 + t2 * (-1.0 / 900.0 + t2 / 52920.0));
  }
  return 1.0 - 4.0 / theta * (1.0 - debye1(theta));
}

/// Inverts frank_tau by bracketed bisection/Newton; tau is strictly
/// increasing in theta. Series inversion handles the near-independence limit.
inline double frank_theta_from_tau(double tau) {
  if (std::abs(tau) < 1e-4) {
    const double t2 = tau * tau;
    return tau * (9.0 + t2 * (7.29 + t2 * 7.6723));
  }
  const double target = std::abs(tau);
  double lo = 1e-6, hi = 1.0;
  while (frank_tau(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw ConfigError("frank tau too close to 1 to invert");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (frank_tau(mid) < target ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  return tau < 0.0 ? -theta : theta;
}

/// Bivariate standard normal CDF P(X<=h, Y<=k) with correlation rho via
/// Owen's T function. Zero arguments are handled by the arctangent limit of
/// T(0,a) so the division by h (or k) never occurs.
inline double bivariate_normal_cdf(double h, double k, double rho) {
  if (rho == 0.0) return std_normal_cdf(h) * std_normal_cdf(k);
  const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
  if (h == 0.0 && k == 0.0) return 0.25 + std::asin(rho) / (2.0 * kPi);
  const auto owen_term = [&](double x, double other) {
    if (x == 0.0) return other > 0.0 ? 0.25 : -0.25;
    return boost::math::owens_t(x, (other - rho * x) / (x * s));
  };
  const double delta = (h * k > 0.0 || (h * k == 0.0 && h + k >= 0.0)) ? 0.0 : 0.5;
  return 0.5 * (std_normal_cdf(h) + std_normal_cdf(k)) - owen_term(h, k) - owen_term(k, h) -
         delta;
}

}  // namespace detail

/// Kendall's tau implied by the family parameter: Clayton theta/(theta+2),
/// Gumbel (theta-1)/theta, Gaussian (2/pi)asin(rho), Frank via the Debye
/// integral, independence 0.
inline double tau_from_theta(ClassicalFamily family, double theta) {
  validate_classical_theta(family, theta);
  switch (family) {
    case ClassicalFamily::clayton: return theta / (theta + 2.0);
    case ClassicalFamily::frank: return detail::frank_tau(theta);
    case ClassicalFamily::gumbel: return (theta - 1.0) / theta;
    case ClassicalFamily::gaussian: return 2.0 / kPi * std::asin(theta);
    case ClassicalFamily::independence: return 0.0;
  }
  throw ConfigError("unknown classical family");
}

/// Inverse of tau_from_theta on the family's attainable tau range.
inline double theta_from_tau(ClassicalFamily family, double tau) {
  if (!std::isfinite(tau) || tau <= -1.0 || tau >= 1.0)
    throw ConfigError("kendall tau must lie in (-1,1)");
  switch (family) {
    case ClassicalFamily::clayton:
      if (tau == 0.0) throw ConfigError("clayton cannot represent tau = 0");
      return 2.0 * tau / (1.0 - tau);
    case ClassicalFamily::frank:
      if (tau == 0.0) throw ConfigError("frank cannot represent tau = 0");
      return detail::frank_theta_from_tau(tau);
    case ClassicalFamily::gumbel:
      if (tau < 0.0) throw ConfigError("gumbel cannot represent negative tau");
      return 1.0 / (1.0 - tau);
    case ClassicalFamily::gaussian:
      return std::sin(kPi * tau / 2.0);
    case ClassicalFamily::independence:
      if (tau != 0.0) throw ConfigError("independence requires tau = 0");
      return 0.0;
  }
  throw ConfigError("unknown classical family");
}

/// Bivariate copula with CDF, density, conditional CDF (of the second
/// coordinate given the first) and its inverse, and a conditional-inversion
/// sampler. Inputs are clamped to the open unit interval.
class ClassicalCopula {
 public:
  ClassicalCopula(ClassicalFamily family, double theta) : family_(family), theta_(theta) {
    validate_classical_theta(family, theta);
    if (family == ClassicalFamily::independence) theta_ = 0.0;
  }

  ClassicalFamily family() const { return family_; }
  double theta() const { return theta_; }
  double tau() const { return tau_from_theta(family_, theta_); }

  double cdf(double u, double v) const {
    u = clamp_unit(u);
    v = clamp_unit(v);
    const double t = theta_;
    switch (family_) {
      case ClassicalFamily::independence:
        return u * v;
      case ClassicalFamily::clayton: {
        if (t > 0.0) {
          const double log_big = log_sum_exp(-t * std::log(u), -t * std::log(v));
          return std::exp(-(log_big + std::log1p(-std::exp(-log_big))) / t);
        }
        const double a = std::pow(u, -t) + std::pow(v, -t) - 1.0;
        return a > 0.0 ? std::pow(a, -1.0 / t) : 0.0;
      }
      case ClassicalFamily::frank: {
        // (e^-tu - e^-t) + (e^-tv - e^-t(u+v)) regrouped so both summands
        // share a sign: log C = -(log|den| - log|expm1(-t)|)/t stays stable
        // at extreme theta where the naive terms round to 1
        const double log_den =
            log_sum_exp(-t * u + std::log(std::abs(std::expm1(-t * (1.0 - u)))),
                        -t * v + std::log(std::abs(std::expm1(-t * u))));
        return -(log_den - std::log(std::abs(std::expm1(-t)))) / t;
      }
      case ClassicalFamily::gumbel: {
        const double lx = std::log(-std::log(u)), ly = std::log(-std::log(v));
        return std::exp(-std::exp(log_sum_exp(t * lx, t * ly) / t));
      }
      case ClassicalFamily::gaussian:
        return detail::bivariate_normal_cdf(std_normal_quantile(u), std_normal_quantile(v), t);
    }
    throw ConfigError("unknown classical family");
  }

  double log_density(double u, double v) const {
    u = clamp_unit(u);
    v = clamp_unit(v);
    const double t = theta_;
    switch (family_) {
      case ClassicalFamily::independence:
        return 0.0;
      case ClassicalFamily::clayton: {
        if (t > 0.0) {
          const double log_big = log_sum_exp(-t * std::log(u), -t * std::log(v));
          const double log_a = log_big + std::log1p(-std::exp(-log_big));
          return std::log1p(t) - (1.0 + t) * (std::log(u) + std::log(v)) -
                 (2.0 + 1.0 / t) * log_a;
        }
        const double a = std::pow(u, -t) + std::pow(v, -t) - 1.0;
        if (a <= 0.0) return -std::numeric_limits<double>::infinity();
        return std::log1p(t) - (1.0 + t) * (std::log(u) + std::log(v)) -
               (2.0 + 1.0 / t) * std::log(a);
      }
      case ClassicalFamily::frank: {
        const double log_den =
            log_sum_exp(-t * u + std::log(std::abs(std::expm1(-t * (1.0 - u)))),
                        -t * v + std::log(std::abs(std::expm1(-t * u))));
        return std::log(std::abs(t * std::expm1(-t))) - t * (u + v) - 2.0 * log_den;
      }
      case ClassicalFamily::gumbel: {
        const double x = -std::log(u), y = -std::log(v);
        const double lx = std::log(x), ly = std::log(y);
        const double log_a = log_sum_exp(t * lx, t * ly);
        return -std::exp(log_a / t) + (t - 1.0) * (lx + ly) + (x + y) +
               (2.0 / t - 2.0) * log_a + std::log1p((t - 1.0) * std::exp(-log_a / t));
      }
      case ClassicalFamily::gaussian: {
        const double x = std_normal_quantile(u), y = std_normal_quantile(v);
        const double s2 = (1.0 - t) * (1.0 + t);
        return -0.5 * std::log(s2) - (t * t * (x * x + y * y) - 2.0 * t * x * y) / (2.0 * s2);
      }
    }
    throw ConfigError("unknown classical family");
  }

  double density(double u, double v) const { return std::exp(log_density(u, v)); }

  /// P(V <= v | U = u), the partial derivative of the CDF in u.
  double conditional(double u, double v) const {
    u = clamp_unit(u);
    v = clamp_unit(v);
    const double t = theta_;
    switch (family_) {
      case ClassicalFamily::independence:
        return v;
      case ClassicalFamily::clayton: {
        const double a = std::pow(u, -t) + std::pow(v, -t) - 1.0;
        if (a <= 0.0) return 0.0;  // below the negative-theta support curve
        return std::pow(u, -t - 1.0) * std::pow(a, -1.0 / t - 1.0);
      }
      case ClassicalFamily::frank: {
        const double log_den =
            log_sum_exp(-t * u + std::log(std::abs(std::expm1(-t * (1.0 - u)))),
                        -t * v + std::log(std::abs(std::expm1(-t * u))));
        return std::exp(-t * u + std::log(std::abs(std::expm1(-t * v))) - log_den);
      }
      case ClassicalFamily::gumbel: {
        const double x = -std::log(u), y = -std::log(v);
        const double lx = std::log(x);
        const double log_a = log_sum_exp(t * lx, t * std::log(y));
        return std::exp(-std::exp(log_a / t) + (1.0 / t - 1.0) * log_a + (t - 1.0) * lx + x);
      }
      case ClassicalFamily::gaussian: {
        const double x = std_normal_quantile(u), y = std_normal_quantile(v);
        return std_normal_cdf((y - t * x) / std::sqrt((1.0 - t) * (1.0 + t)));
      }
    }
    throw ConfigError("unknown classical family");
  }

  /// Solves conditional(u, v) = p for v. Closed form except for Gumbel,
  /// which uses bisection-safeguarded Newton (the derivative in v is the
  /// copula density).
  double conditional_inverse(double u, double p) const {
    u = clamp_unit(u);
    p = clamp_unit(p);
    const double t = theta_;
    switch (family_) {
      case ClassicalFamily::independence:
        return p;
      case ClassicalFamily::clayton: {
        if (t > 0.0) {
          const double w = std::pow(p, -t / (1.0 + t)) - 1.0;
          const double log_b = log_sum_exp(std::log(w) - t * std::log(u), 0.0);
          return std::exp(-log_b / t);
        }
        break;  // negative-theta support boundary: fall through to the solver
      }
      case ClassicalFamily::frank: {
        // denominator e^-tu + p(1 - e^-tu) regrouped as e^-tu(1-p) + p:
        // both terms positive for every theta
        const double e = -std::expm1(-t);
        const double den = std::exp(-t * u) * (1.0 - p) + p;
        return -std::log1p(-p * e / den) / t;
      }
      case ClassicalFamily::gumbel:
        if (t == 1.0) return p;
        break;  // no closed form: solver below
      case ClassicalFamily::gaussian: {
        const double x = std_normal_quantile(u);
        const double s = std::sqrt((1.0 - t) * (1.0 + t));
        return std_normal_cdf(t * x + s * std_normal_quantile(p));
      }
      default:
        break;
    }
    double lo = kUnitEps, hi = 1.0 - kUnitEps;
    double v = std::clamp(p, lo, hi);
    for (int it = 0; it < 100; ++it) {
      const double f = conditional(u, v) - p;
      (f < 0.0 ? lo : hi) = v;
      const double deriv = density(u, v);
      double step = v - f / deriv;
      if (!(deriv > 0.0) || step <= lo || step >= hi) step = 0.5 * (lo + hi);
      if (std::abs(step - v) < 1e-15 * (1.0 + std::abs(v)) || hi - lo < 1e-15) {
        v = step;
        break;
      }
      v = step;
    }
    return v;
  }

  /// n pairs via conditional inversion: U uniform, V = conditional_inverse(U,P).
  Eigen::MatrixXd sample(int n, Rng& rng) const {
    if (n < 1) throw ConfigError("sample size must be positive");
    Eigen::MatrixXd out(n, 2);
    for (int i = 0; i < n; ++i) {
      const double uu = rng.uniform();
      const double pp = rng.uniform();
      out(i, 0) = uu;
      out(i, 1) = conditional_inverse(uu, pp);
    }
    return out;
  }

 private:
  ClassicalFamily family_;
  double theta_;
};

/// Family tag plus scalar parameter for the copula that couples the radial
/// levels of a Kendall vector copula.
struct NestingCopulaSpec {
  ClassicalFamily family = ClassicalFamily::independence;
  double theta = 0.0;
};

/// K-dimensional copula of the radial levels. Archimedean families are
/// bivariate (K=2 only); the Gaussian family extends to any K >= 2 as the
/// exchangeable correlation matrix (1-rho)I + rho 11', valid for
/// rho in (-1/(K-1), 1); independence supports any K.
class NestingCopula {
 public:
  NestingCopula(NestingCopulaSpec spec, int k) : spec_(spec), k_(k) {
    if (k < 1) throw ConfigError("nesting copula dimension must be positive");
    validate_classical_theta(spec.family, spec.theta);
    if (k == 1 || spec.family == ClassicalFamily::independence) {
      spec_.family = ClassicalFamily::independence;
      spec_.theta = 0.0;
      return;
    }
    if (spec.family == ClassicalFamily::gaussian) {
      if (k > 2 && spec.theta <= -1.0 / (k - 1.0))
        throw ConfigError("exchangeable gaussian nesting requires rho > -1/(K-1)");
      Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(k, k, spec.theta);
      corr.diagonal().setOnes();
      llt_.compute(corr);
      if (llt_.info() != Eigen::Success)
        throw ConfigError("gaussian nesting correlation matrix is not positive definite");
      log_det_ = 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
      return;
    }
    if (k != 2)
      throw ConfigError("archimedean nesting copulas support exactly two blocks");
    pair_.emplace(spec.family, spec.theta);
  }

  const NestingCopulaSpec& spec() const { return spec_; }
  int dim() const { return k_; }
  double tau() const { return tau_from_theta(spec_.family, spec_.theta); }

  double log_density(const Eigen::VectorXd& v) const {
    if (v.size() != k_) throw ConfigError("nesting copula point has wrong dimension");
    switch (spec_.family) {
      case ClassicalFamily::independence:
        return 0.0;
      case ClassicalFamily::gaussian: {
        Eigen::VectorXd x(k_);
        for (int i = 0; i < k_; ++i) x[i] = std_normal_quantile(clamp_unit(v[i]));
        const double quad = x.dot(llt_.solve(x));
        return -0.5 * log_det_ - 0.5 * (quad - x.squaredNorm());
      }
      default:
        return pair_->log_density(v[0], v[1]);
    }
  }

  double density(const Eigen::VectorXd& v) const { return std::exp(log_density(v)); }

  Eigen::MatrixXd sample(int n, Rng& rng) const {
    if (n < 1) throw ConfigError("sample size must be positive");
    Eigen::MatrixXd out(n, k_);
    switch (spec_.family) {
      case ClassicalFamily::independence:
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < k_; ++j) out(i, j) = rng.uniform();
        return out;
      case ClassicalFamily::gaussian: {
        const Eigen::MatrixXd chol = llt_.matrixL();
        Eigen::VectorXd z(k_);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < k_; ++j) z[j] = rng.normal();
          const Eigen::VectorXd y = chol * z;
          for (int j = 0; j < k_; ++j) out(i, j) = std_normal_cdf(y[j]);
        }
        return out;
      }
      default:
        return pair_->sample(n, rng);
    }
  }

 private:
  NestingCopulaSpec spec_;
  int k_ = 0;
  std::optional<ClassicalCopula> pair_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
};

}  // namespace vcop
