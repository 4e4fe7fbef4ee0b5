#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcop {

/// Invalid configuration or parameters (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input data (CLI exit code 3).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: non-PD matrix, optimizer breakdown, etc. (CLI exit code 4).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Probabilities are clamped to [kUnitEps, 1 - kUnitEps] before quantile maps
/// so downstream transforms stay finite.
inline constexpr double kUnitEps = 1e-12;

inline double clamp_unit(double p) {
  if (p < kUnitEps) return kUnitEps;
  if (p > 1.0 - kUnitEps) return 1.0 - kUnitEps;
  return p;
}

/// Partition of a d-dimensional vector into K contiguous blocks of sizes
/// (d_1, ..., d_K). Block k covers coordinates [offset(k), offset(k) + dim(k)).
struct BlockStructure {
  std::vector<int> dims;

  BlockStructure() = default;
  explicit BlockStructure(std::vector<int> block_dims) : dims(std::move(block_dims)) {
    if (dims.empty()) throw ConfigError("block structure requires at least one block");
    for (int dk : dims)
      if (dk < 1) throw ConfigError("block dimensions must be positive");
  }

  int count() const { return static_cast<int>(dims.size()); }
  int dim(int k) const { return dims.at(static_cast<std::size_t>(k)); }
  int total() const { return std::accumulate(dims.begin(), dims.end(), 0); }
  int offset(int k) const {
    return std::accumulate(dims.begin(), dims.begin() + k, 0);
  }
  bool operator==(const BlockStructure& other) const { return dims == other.dims; }
};

}  // namespace vcop
