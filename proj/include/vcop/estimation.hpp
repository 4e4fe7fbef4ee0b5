#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "vcop/classical.hpp"
#include "vcop/common.hpp"
#include "vcop/gaussian_vc.hpp"
#include "vcop/special.hpp"

namespace vcop {

/// Empirical vector ranks ready for estimation: one block-partitioned point
/// on the unit cube per observation.
struct RankSample {
  BlockStructure blocks;
  Eigen::MatrixXd u;  // n rows, blocks.total() columns

  int n() const { return static_cast<int>(u.rows()); }

  void validate() const {
    if (u.cols() != blocks.total())
      throw ConfigError("rank sample width must match the block structure");
    if (u.rows() < 2) throw ConfigError("rank sample needs at least 2 observations");
    if (u.size() > 0 && (u.minCoeff() < 0.0 || u.maxCoeff() > 1.0))
      throw DataError("ranks must lie in [0,1]");
  }
};

enum class FitMethod { mle, tau_inversion, moments };

inline std::string to_string(FitMethod method) {
  switch (method) {
    case FitMethod::mle: return "mle";
    case FitMethod::tau_inversion: return "tau_inversion";
    case FitMethod::moments: return "moments";
  }
  throw ConfigError("unknown fit method");
}

/// One fitted nesting-copula parameter with its implied Kendall tau. The tau
/// field is always tau_from_theta(theta), never the raw empirical statistic.
struct FitReport {
  ClassicalFamily family = ClassicalFamily::independence;
  double theta = 0.0;
  double tau = 0.0;
  double loglik = 0.0;
  int n = 0;
  FitMethod method = FitMethod::mle;
  bool boundary = false;
};

/// MLE and tau-inversion fits of the same family, reported side by side.
struct NestingFit {
  FitReport mle;
  FitReport tau_inversion;
};

/// Kendall's tau-b by Knight's merge-count algorithm:
/// S = n0 - t_x - t_y + t_xy - 2 * (strict inversions of y after sorting by x),
/// tau = S / sqrt((n0 - t_x)(n0 - t_y)). O(n log n).
inline double kendalls_tau_empirical(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const auto n = x.size();
  if (n < 2) throw ConfigError("Kendall's tau needs at least 2 observations");
  if (y.size() != n) throw ConfigError("Kendall's tau requires equal-length inputs");

  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  auto pair_count = [](long long t) { return t * (t - 1) / 2; };
  long long ties_x = 0, ties_xy = 0;
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j < n && x[idx[j]] == x[idx[i]]) {
      Eigen::Index k = j;
      while (k < n && x[idx[k]] == x[idx[i]] && y[idx[k]] == y[idx[j]]) ++k;
      ties_xy += pair_count(k - j);
      j = k;
    }
    ties_x += pair_count(j - i);
    i = j;
  }

  std::vector<double> ys(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ys[i] = y[idx[i]];

  // merge sort counting strict inversions; equal keys taken from the left
  long long swaps = 0;
  std::vector<double> buf(ys.size());
  for (std::size_t width = 1; width < ys.size(); width *= 2) {
    for (std::size_t lo = 0; lo + width < ys.size(); lo += 2 * width) {
      const std::size_t mid = lo + width, hi = std::min(lo + 2 * width, ys.size());
      std::size_t a = lo, b = mid, out = lo;
      while (a < mid && b < hi) {
        if (ys[b] < ys[a]) {
          swaps += static_cast<long long>(mid - a);
          buf[out++] = ys[b++];
        } else {
          buf[out++] = ys[a++];
        }
      }
      while (a < mid) buf[out++] = ys[a++];
      while (b < hi) buf[out++] = ys[b++];
      std::copy(buf.begin() + lo, buf.begin() + hi, ys.begin() + lo);
    }
  }

  long long ties_y = 0;
  for (std::size_t i = 0; i < ys.size();) {
    std::size_t j = i;
    while (j < ys.size() && ys[j] == ys[i]) ++j;
    ties_y += pair_count(static_cast<long long>(j - i));
    i = j;
  }

  const long long n0 = pair_count(n);
  const double s =
      static_cast<double>(n0 - ties_x - ties_y + ties_xy) - 2.0 * static_cast<double>(swaps);
  const double denom = std::sqrt(static_cast<double>(n0 - ties_x)) *
                       std::sqrt(static_cast<double>(n0 - ties_y));
  if (denom == 0.0) throw DataError("Kendall's tau undefined: a margin is constant");
  return s / denom;
}

inline double kendalls_tau_empirical(const Eigen::MatrixXd& pairs) {
  if (pairs.cols() != 2) throw ConfigError("Kendall's tau expects two columns");
  return kendalls_tau_empirical(pairs.col(0), pairs.col(1));
}

/// Method-of-moments Gaussian vector copula: correlation of componentwise
/// normal scores with diagonal blocks pinned to identity; projected back to
/// positive definite (eigenvalue floor 1e-8) when sampling noise breaks it.
inline GaussianVCParams fit_gaussian_vc_mom(const RankSample& ranks) {
  ranks.validate();
  const int d = ranks.blocks.total();
  const int n = ranks.n();
  if (n < d + 1) throw ConfigError("method of moments needs more observations than dimensions");

  Eigen::MatrixXd z(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = std_normal_quantile(ranks.u(i, j));
  const Eigen::RowVectorXd mean = z.colwise().mean();
  z.rowwise() -= mean;
  const Eigen::VectorXd sd = (z.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt();
  if (sd.minCoeff() <= 0.0) throw DataError("degenerate ranks: a coordinate has zero variance");
  Eigen::MatrixXd corr = z.transpose() * z / static_cast<double>(n);
  corr = sd.cwiseInverse().asDiagonal() * corr * sd.cwiseInverse().asDiagonal();

  GaussianVCParams params{Eigen::MatrixXd::Identity(d, d), ranks.blocks};
  const auto& blocks = ranks.blocks;
  for (int k = 0; k < blocks.count(); ++k)
    for (int l = 0; l < blocks.count(); ++l) {
      if (k == l) continue;
      params.omega.block(blocks.offset(k), blocks.offset(l), blocks.dim(k), blocks.dim(l)) =
          corr.block(blocks.offset(k), blocks.offset(l), blocks.dim(k), blocks.dim(l));
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(params.omega);
  if (eig.eigenvalues().minCoeff() < 1e-8) {
    const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(1e-8);
    Eigen::MatrixXd m = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::VectorXd scale = m.diagonal().cwiseSqrt().cwiseInverse();
    m = scale.asDiagonal() * m * scale.asDiagonal();
    // rescaling can nudge the pinned blocks; shrink toward identity until the
    // pinned matrix is safely positive definite again
    for (double w = 1.0; w > 1e-3; w *= 0.75) {
      Eigen::MatrixXd candidate = Eigen::MatrixXd::Identity(d, d);
      for (int k = 0; k < blocks.count(); ++k)
        for (int l = 0; l < blocks.count(); ++l) {
          if (k == l) continue;
          candidate.block(blocks.offset(k), blocks.offset(l), blocks.dim(k), blocks.dim(l)) =
              w * m.block(blocks.offset(k), blocks.offset(l), blocks.dim(k), blocks.dim(l));
        }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(candidate);
      if (check.eigenvalues().minCoeff() >= 1e-8) {
        params.omega = candidate;
        break;
      }
    }
  }
  params.omega = 0.5 * (params.omega + params.omega.transpose());
  params.validate();
  return params;
}

/// Per-block Kendall transform: V_k = K_{d_k}(prod_j U_kj), the level of each
/// block product under the independence Kendall distribution. Output has one
/// column per block and uniform margins when the ranks are uniform.
inline Eigen::MatrixXd kendall_transform(const RankSample& ranks) {
  ranks.validate();
  const auto& blocks = ranks.blocks;
  Eigen::MatrixXd v(ranks.n(), blocks.count());
  for (int i = 0; i < ranks.n(); ++i)
    for (int k = 0; k < blocks.count(); ++k) {
      double log_prod = 0.0;
      for (int j = 0; j < blocks.dim(k); ++j)
        log_prod += std::log(clamp_unit(ranks.u(i, blocks.offset(k) + j)));
      v(i, k) = radial_cdf(log_prod, blocks.dim(k));
    }
  return v;
}

namespace detail {

struct FamilyBracket {
  double lo;
  double hi;
};

inline FamilyBracket mle_bracket(ClassicalFamily family) {
  switch (family) {
    case ClassicalFamily::clayton: return {-1.0 + 1e-6, 50.0};
    case ClassicalFamily::frank: return {-50.0, 50.0};
    case ClassicalFamily::gumbel: return {1.0, 50.0};
    case ClassicalFamily::gaussian: return {-1.0 + 1e-9, 1.0 - 1e-9};
    case ClassicalFamily::independence: break;
  }
  throw ConfigError("independence family has no parameter to fit");
}

inline double nesting_loglik(const Eigen::MatrixXd& v, ClassicalFamily family, double theta) {
  // Clayton and Frank approach independence as theta -> 0; evaluate the limit
  // directly since theta = 0 itself is outside both parameter ranges
  if ((family == ClassicalFamily::clayton || family == ClassicalFamily::frank) &&
      std::abs(theta) < 1e-12)
    return 0.0;
  try {
    const NestingCopula copula(NestingCopulaSpec{family, theta}, static_cast<int>(v.cols()));
    double total = 0.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) total += copula.log_density(v.row(i).transpose());
    return total;
  } catch (const ConfigError&) {
    // theta outside the feasible region for this block count (e.g. an
    // exchangeable correlation below -1/(K-1)) scores as impossible
    return -std::numeric_limits<double>::infinity();
  }
}

/// Golden-section maximization of f on [lo, hi] to the requested x tolerance.
template <typename F>
double golden_max(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Maximum likelihood over the family's parameter range: coarse scan in tau
/// space, golden-section refinement, then safeguarded Newton polish to 1e-8.
/// The returned report also carries the tau-inversion estimate side by side.
inline NestingFit fit_nesting_copula(const Eigen::MatrixXd& v, ClassicalFamily family) {
  if (family == ClassicalFamily::independence)
    throw ConfigError("independence family has no parameter to fit");
  if (v.rows() < 10) throw ConfigError("nesting copula fit needs at least 10 observations");
  if (v.cols() < 2) throw ConfigError("nesting copula fit needs at least 2 blocks");
  if (v.cols() > 2 && family != ClassicalFamily::gaussian)
    throw ConfigError("non-Gaussian nesting families support exactly 2 blocks");
  if (v.minCoeff() < 0.0 || v.maxCoeff() > 1.0)
    throw DataError("nesting copula fit inputs must lie in [0,1]");

  const auto bracket = detail::mle_bracket(family);
  const auto loglik = [&](double theta) {
    if (theta < bracket.lo || theta > bracket.hi)
      return -std::numeric_limits<double>::infinity();
    return detail::nesting_loglik(v, family, theta);
  };

  // coarse scan: tau-space grid mapped into theta, clipped to the bracket
  std::vector<double> thetas;
  for (int i = 0; i <= 40; ++i) {
    const double tau = -0.95 + 1.9 * i / 40.0;
    if (std::abs(tau) < 1e-3) continue;
    if (family == ClassicalFamily::gumbel && tau < 0.0) continue;
    const double theta = theta_from_tau(family, tau);
    thetas.push_back(std::clamp(theta, bracket.lo, bracket.hi));
  }
  if (family == ClassicalFamily::gumbel) thetas.push_back(1.0);
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());

  std::size_t best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double ll = loglik(thetas[i]);
    if (ll > best_ll) {
      best_ll = ll;
      best = i;
    }
  }
  const double scan_lo = best == 0 ? bracket.lo : thetas[best - 1];
  const double scan_hi = best + 1 == thetas.size() ? bracket.hi : thetas[best + 1];
  double theta_hat = detail::golden_max(loglik, scan_lo, scan_hi, 1e-6);

  // Newton polish with central differences, kept inside the bracket
  for (int iter = 0; iter < 12; ++iter) {
    const double h = 1e-5 * std::max(1.0, std::abs(theta_hat));
    const double fp = loglik(theta_hat + h), fm = loglik(theta_hat - h), f0 = loglik(theta_hat);
    if (!std::isfinite(fp) || !std::isfinite(fm) || !std::isfinite(f0)) break;
    const double grad = (fp - fm) / (2.0 * h);
    const double hess = (fp - 2.0 * f0 + fm) / (h * h);
    if (!(hess < 0.0)) break;
    double step = -grad / hess;
    step = std::clamp(step, -0.1 * std::max(1.0, std::abs(theta_hat)),
                      0.1 * std::max(1.0, std::abs(theta_hat)));
    const double candidate = std::clamp(theta_hat + step, bracket.lo, bracket.hi);
    if (loglik(candidate) + 1e-12 < f0) break;
    const bool converged = std::abs(candidate - theta_hat) < 1e-8;
    theta_hat = candidate;
    if (converged) break;
  }

  NestingFit fit;
  const int n = static_cast<int>(v.rows());
  const double edge_tol = 1e-6;
  fit.mle.family = family;
  fit.mle.theta = theta_hat;
  fit.mle.tau = tau_from_theta(family, theta_hat);
  fit.mle.loglik = loglik(theta_hat);
  fit.mle.n = n;
  fit.mle.method = FitMethod::mle;
  fit.mle.boundary = theta_hat - bracket.lo < edge_tol * std::max(1.0, std::abs(bracket.lo)) ||
                     bracket.hi - theta_hat < edge_tol * std::max(1.0, std::abs(bracket.hi));

  // tau inversion: empirical tau-b (averaged over block pairs when K > 2)
  double tau_emp = 0.0;
  int pairs = 0;
  for (Eigen::Index a = 0; a < v.cols(); ++a)
    for (Eigen::Index b = a + 1; b < v.cols(); ++b) {
      tau_emp += kendalls_tau_empirical(v.col(a), v.col(b));
      ++pairs;
    }
  tau_emp /= static_cast<double>(pairs);

  bool tau_clipped = false;
  if (family == ClassicalFamily::gumbel && tau_emp < 0.0) {
    tau_emp = 0.0;
    tau_clipped = true;
  }
  if ((family == ClassicalFamily::clayton || family == ClassicalFamily::frank) && tau_emp == 0.0)
    tau_emp = 1e-10;
  const double tau_cap = 1.0 - 1e-9;
  if (std::abs(tau_emp) > tau_cap) {
    tau_emp = std::copysign(tau_cap, tau_emp);
    tau_clipped = true;
  }

  double theta_tau = family == ClassicalFamily::gumbel && tau_emp == 0.0
                         ? 1.0
                         : theta_from_tau(family, tau_emp);
  theta_tau = std::clamp(theta_tau, bracket.lo, bracket.hi);
  fit.tau_inversion.family = family;
  fit.tau_inversion.theta = theta_tau;
  fit.tau_inversion.tau = tau_from_theta(family, theta_tau);
  fit.tau_inversion.loglik = loglik(theta_tau);
  fit.tau_inversion.n = n;
  fit.tau_inversion.method = FitMethod::tau_inversion;
  fit.tau_inversion.boundary =
      tau_clipped || theta_tau - bracket.lo < edge_tol * std::max(1.0, std::abs(bracket.lo)) ||
      bracket.hi - theta_tau < edge_tol * std::max(1.0, std::abs(bracket.hi));
  return fit;
}

}  // namespace vcop
