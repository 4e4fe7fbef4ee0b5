#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vcop/common.hpp"
#include "vcop/rng.hpp"

namespace vcop {

enum class ExtremalKind { independence, comonotonic, countermonotonic };

inline std::string to_string(ExtremalKind kind) {
  switch (kind) {
    case ExtremalKind::independence: return "independence";
    case ExtremalKind::comonotonic: return "comonotonic";
    case ExtremalKind::countermonotonic: return "countermonotonic";
  }
  throw ConfigError("unknown extremal kind");
}

inline ExtremalKind parse_extremal_kind(const std::string& name) {
  if (name == "independence") return ExtremalKind::independence;
  if (name == "comonotonic") return ExtremalKind::comonotonic;
  if (name == "countermonotonic") return ExtremalKind::countermonotonic;
  throw ConfigError("unknown extremal kind '" + name + "'");
}

namespace detail {

inline void check_extremal_blocks(ExtremalKind kind, const std::vector<Eigen::Index>& dims) {
  if (dims.empty()) throw ConfigError("extremal copula needs at least one block");
  if (kind == ExtremalKind::comonotonic) {
    for (const auto d : dims)
      if (d != dims.front())
        throw ConfigError("comonotonic copula requires equal block dimensions");
  }
  if (kind == ExtremalKind::countermonotonic) {
    if (dims.size() != 2 || dims[0] != dims[1])
      throw ConfigError("countermonotonic copula requires exactly two equal-dimension blocks");
  }
}

}  // namespace detail

/// CDF of the extremal vector copulas at one block-partitioned point:
/// independence multiplies every coordinate; the upper bound multiplies the
/// across-block minima coordinate by coordinate; the lower bound (two equal
/// blocks) multiplies max(u1j + u2j - 1, 0) coordinatewise.
inline double extremal_cdf(const std::vector<Eigen::VectorXd>& u, ExtremalKind kind) {
  std::vector<Eigen::Index> dims;
  for (const auto& block : u) dims.push_back(block.size());
  detail::check_extremal_blocks(kind, dims);
  for (const auto& block : u)
    for (Eigen::Index j = 0; j < block.size(); ++j)
      if (block[j] < 0.0 || block[j] > 1.0)
        throw ConfigError("copula arguments must lie in [0,1]");
  double prob = 1.0;
  switch (kind) {
    case ExtremalKind::independence:
      for (const auto& block : u)
        for (Eigen::Index j = 0; j < block.size(); ++j) prob *= block[j];
      return prob;
    case ExtremalKind::comonotonic:
      for (Eigen::Index j = 0; j < dims.front(); ++j) {
        double m = 1.0;
        for (const auto& block : u) m = std::min(m, block[j]);
        prob *= m;
      }
      return prob;
    case ExtremalKind::countermonotonic:
      for (Eigen::Index j = 0; j < dims.front(); ++j)
        prob *= std::max(u[0][j] + u[1][j] - 1.0, 0.0);
      return prob;
  }
  throw ConfigError("unknown extremal kind");
}

/// Convenience overload on a flat point partitioned by a block structure.
inline double extremal_cdf(const Eigen::VectorXd& u, const BlockStructure& blocks,
                           ExtremalKind kind) {
  if (u.size() != blocks.total()) throw ConfigError("point has wrong dimension");
  std::vector<Eigen::VectorXd> parts;
  for (int k = 0; k < blocks.count(); ++k)
    parts.push_back(u.segment(blocks.offset(k), blocks.dim(k)));
  return extremal_cdf(parts, kind);
}

/// Samplers realizing the extremal dependence: one shared uniform block for
/// the upper bound, a block and its reflection for the lower bound, and iid
/// uniforms for independence.
inline Eigen::MatrixXd extremal_sample(ExtremalKind kind, const BlockStructure& blocks, int n,
                                       Rng& rng) {
  std::vector<Eigen::Index> dims;
  for (int k = 0; k < blocks.count(); ++k) dims.push_back(blocks.dim(k));
  detail::check_extremal_blocks(kind, dims);
  if (n < 1) throw ConfigError("sample size must be positive");
  Eigen::MatrixXd out(n, blocks.total());
  for (int i = 0; i < n; ++i) {
    switch (kind) {
      case ExtremalKind::independence:
        for (int j = 0; j < blocks.total(); ++j) out(i, j) = rng.uniform();
        break;
      case ExtremalKind::comonotonic: {
        const int d = blocks.dim(0);
        Eigen::VectorXd shared(d);
        for (int j = 0; j < d; ++j) shared[j] = rng.uniform();
        for (int k = 0; k < blocks.count(); ++k)
          out.row(i).segment(blocks.offset(k), d) = shared.transpose();
        break;
      }
      case ExtremalKind::countermonotonic: {
        const int d = blocks.dim(0);
        for (int j = 0; j < d; ++j) {
          const double value = rng.uniform();
          out(i, j) = value;
          out(i, blocks.offset(1) + j) = 1.0 - value;
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace vcop
