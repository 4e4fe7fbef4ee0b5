#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vcop/common.hpp"
#include "vcop/rng.hpp"

namespace vcop {

enum class GridScheme { lattice, halton, random };

inline std::string to_string(GridScheme s) {
  switch (s) {
    case GridScheme::lattice: return "lattice";
    case GridScheme::halton: return "halton";
    case GridScheme::random: return "random";
  }
  return "?";
}

inline GridScheme parse_grid_scheme(const std::string& s) {
  if (s == "lattice") return GridScheme::lattice;
  if (s == "halton") return GridScheme::halton;
  if (s == "random") return GridScheme::random;
  throw ConfigError("unknown grid scheme '" + s + "' (expected lattice|halton|random)");
}

/// Discretization of the uniform reference measure on [0,1]^d: n pairwise
/// distinct points, deterministic for lattice/halton and seed-reproducible
/// for random.
struct RankGrid {
  int dim = 0;
  GridScheme scheme = GridScheme::halton;
  std::uint64_t seed = 0;
  Eigen::MatrixXd points;  // n x dim, rows are grid points

  int size() const { return static_cast<int>(points.rows()); }
};

namespace detail {

inline std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  primes.reserve(static_cast<std::size_t>(count));
  for (int cand = 2; static_cast<int>(primes.size()) < count; ++cand) {
    bool is_prime = true;
    for (int p : primes) {
      if (p * p > cand) break;
      if (cand % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(cand);
  }
  return primes;
}

/// van der Corput radical inverse of k in the given base.
inline double radical_inverse(std::uint64_t k, int base) {
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double result = 0.0;
  while (k > 0) {
    result += factor * static_cast<double>(k % static_cast<std::uint64_t>(base));
    k /= static_cast<std::uint64_t>(base);
    factor *= inv_base;
  }
  return result;
}

inline void require_distinct_rows(const Eigen::MatrixXd& pts) {
  const int n = static_cast<int>(pts.rows());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    for (int j = 0; j < pts.cols(); ++j) {
      if (pts(a, j) != pts(b, j)) return pts(a, j) < pts(b, j);
    }
    return false;
  });
  for (int i = 1; i < n; ++i) {
    if ((pts.row(order[static_cast<std::size_t>(i)]) ==
         pts.row(order[static_cast<std::size_t>(i - 1)])))
      throw NumericalError("grid points are not pairwise distinct");
  }
}

}  // namespace detail

/// Builds the reference grid.
///  - lattice: requires n = m^d; centers ((i_1 - 1/2)/m, ..., (i_d - 1/2)/m)
///    in odometer order with the last axis fastest.
///  - halton: points k = 1..n of the Halton sequence in the first d prime bases.
///  - random: seeded uniforms.
inline RankGrid make_grid(int n, int d, GridScheme scheme, std::uint64_t seed = 0) {
  if (n < 1) throw ConfigError("grid requires n >= 1");
  if (d < 1) throw ConfigError("grid requires d >= 1");

  RankGrid grid;
  grid.dim = d;
  grid.scheme = scheme;
  grid.seed = seed;
  grid.points.resize(n, d);

  switch (scheme) {
    case GridScheme::lattice: {
      const int m = static_cast<int>(std::llround(std::pow(static_cast<double>(n), 1.0 / d)));
      auto ipow = [](long long base, int exp) {
        long long r = 1;
        for (int i = 0; i < exp; ++i) r *= base;
        return r;
      };
      int side = 0;
      for (int cand : {m - 1, m, m + 1}) {
        if (cand >= 1 && ipow(cand, d) == n) side = cand;
      }
      if (side == 0)
        throw ConfigError("lattice grid requires n = m^d; got n=" + std::to_string(n) +
                          ", d=" + std::to_string(d) +
                          " (use the halton scheme for arbitrary n)");
      std::vector<int> idx(static_cast<std::size_t>(d), 0);
      for (int r = 0; r < n; ++r) {
        for (int j = 0; j < d; ++j)
          grid.points(r, j) = (idx[static_cast<std::size_t>(j)] + 0.5) / side;
        for (int j = d - 1; j >= 0; --j) {
          if (++idx[static_cast<std::size_t>(j)] < side) break;
          idx[static_cast<std::size_t>(j)] = 0;
        }
      }
      break;
    }
    case GridScheme::halton: {
      const auto bases = detail::first_primes(d);
      for (int r = 0; r < n; ++r)
        for (int j = 0; j < d; ++j)
          grid.points(r, j) = detail::radical_inverse(static_cast<std::uint64_t>(r) + 1,
                                                      bases[static_cast<std::size_t>(j)]);
      break;
    }
    case GridScheme::random: {
      Rng rng(Rng::derive(seed, 0x67726964ULL));
      for (int r = 0; r < n; ++r)
        for (int j = 0; j < d; ++j) grid.points(r, j) = rng.uniform();
      break;
    }
  }
  detail::require_distinct_rows(grid.points);
  return grid;
}

}  // namespace vcop
