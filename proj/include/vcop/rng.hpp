#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vcop/common.hpp"

namespace vcop {

/// Deterministic random source. All distribution transforms are implemented
/// here (not via <random> distribution classes, whose output is
/// implementation-defined), so identical seeds give identical streams on any
/// conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on the open interval (0, 1): 53-bit mantissa, half-ulp offset.
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per pair of draws.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * 3.14159265358979323846 * uniform();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  /// Exponential(1).
  double exponential() { return -std::log(uniform()); }

  /// Gamma(shape, rate) via Marsaglia-Tsang squeeze; shape < 1 handled by the
  /// boost-shape trick.
  double gamma(double shape, double rate) {
    if (shape <= 0.0 || rate <= 0.0)
      throw ConfigError("gamma sampler requires positive shape and rate");
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

  /// splitmix64 finalizer; used to derive independent sub-stream seeds.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Deterministic sub-seed for (seed, stream) pairs; order-sensitive.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return mix(mix(seed) ^ stream);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// W with 1/W ~ Gamma(shape, rate); for shape = rate = nu/2, nu/W ~ chi-squared(nu).
inline double sample_inverse_gamma(double shape, double rate, Rng& rng) {
  return 1.0 / rng.gamma(shape, rate);
}

/// Uniform direction on the unit sphere in R^d (d=1: fair sign).
inline std::vector<double> sample_sphere(int d, Rng& rng) {
  if (d < 1) throw ConfigError("sphere dimension must be positive");
  std::vector<double> x(static_cast<std::size_t>(d));
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& xi : x) {
      xi = rng.normal();
      norm2 += xi * xi;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& xi : x) xi *= inv;
  return x;
}

/// Uniform on the standard simplex {s >= 0, sum s = 1} via normalized
/// exponential spacings. d=1 returns {1} without consuming randomness.
inline std::vector<double> sample_simplex(int d, Rng& rng) {
  if (d < 1) throw ConfigError("simplex dimension must be positive");
  std::vector<double> s(static_cast<std::size_t>(d));
  if (d == 1) {
    s[0] = 1.0;
    return s;
  }
  double total = 0.0;
  for (auto& si : s) {
    si = rng.exponential();
    total += si;
  }
  for (auto& si : s) si /= total;
  return s;
}

}  // namespace vcop
