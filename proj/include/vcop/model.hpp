#pragma once

#include <variant>
#include <vector>

#include <Eigen/Core>

#include "vcop/extremal.hpp"
#include "vcop/gaussian_vc.hpp"
#include "vcop/kendall_vc.hpp"
#include "vcop/student_vc.hpp"

namespace vcop {

/// Parameters of an extremal vector copula, shaped like the parametric
/// families so it can join the model variant.
struct ExtremalParams {
  ExtremalKind kind = ExtremalKind::independence;
  BlockStructure blocks;

  void validate() const {
    std::vector<Eigen::Index> dims(blocks.dims.begin(), blocks.dims.end());
    detail::check_extremal_blocks(kind, dims);
  }
};

/// Tagged union over every vector-copula family the tool can simulate.
using VectorCopulaModel =
    std::variant<GaussianVCParams, StudentVCParams, KendallVCParams, ExtremalParams>;

inline const BlockStructure& model_blocks(const VectorCopulaModel& model) {
  return std::visit([](const auto& p) -> const BlockStructure& { return p.blocks; }, model);
}

inline void model_validate(const VectorCopulaModel& model) {
  std::visit([](const auto& p) { p.validate(); }, model);
}

/// Density of the model at one point on the cube. Extremal copulas other than
/// independence are singular and have no density.
inline double model_density(const Eigen::VectorXd& u, const VectorCopulaModel& model) {
  return std::visit(
      [&u](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GaussianVCParams>) {
          return gaussian_vc_density(u, p);
        } else if constexpr (std::is_same_v<P, StudentVCParams>) {
          return student_vc_density(u, p);
        } else if constexpr (std::is_same_v<P, KendallVCParams>) {
          return kendall_vc_density(u, p);
        } else {
          if (p.kind != ExtremalKind::independence)
            throw ConfigError("extremal copulas are singular and have no density");
          if (u.size() != p.blocks.total())
            throw ConfigError("point dimension must match the block structure");
          return 1.0;
        }
      },
      model);
}

inline Eigen::MatrixXd model_sample(const VectorCopulaModel& model, int n, Rng& rng) {
  return std::visit(
      [n, &rng](const auto& p) -> Eigen::MatrixXd {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GaussianVCParams>) {
          return gaussian_vc_sample(p, n, rng);
        } else if constexpr (std::is_same_v<P, StudentVCParams>) {
          return student_vc_sample(p, n, rng);
        } else if constexpr (std::is_same_v<P, KendallVCParams>) {
          return kendall_vc_sample(p, n, rng);
        } else {
          return extremal_sample(p.kind, p.blocks, n, rng);
        }
      },
      model);
}

}  // namespace vcop
