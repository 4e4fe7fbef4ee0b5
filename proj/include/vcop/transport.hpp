#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "vcop/assignment.hpp"
#include "vcop/common.hpp"
#include "vcop/grid.hpp"
#include "vcop/parallel.hpp"

namespace vcop {

/// Sample of n observations in R^d, optionally labeled (e.g. by date).
struct ObservationMatrix {
  Eigen::MatrixXd values;  // n x d
  std::vector<std::string> labels;

  ObservationMatrix() = default;
  explicit ObservationMatrix(Eigen::MatrixXd v, std::vector<std::string> row_labels = {})
      : values(std::move(v)), labels(std::move(row_labels)) {
    if (values.rows() < 1) throw DataError("observation matrix requires n >= 1");
    if (!values.allFinite()) throw DataError("observation matrix has non-finite entries");
    if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != values.rows())
      throw DataError("observation labels do not match row count");
  }

  int n() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }
};

/// Pairwise squared Euclidean distances: entry (i, j) = ||y_i - u_j||^2.
/// Rows are computed independently (parallelizable, bit-identical).
inline Eigen::MatrixXd squared_cost_matrix(const ObservationMatrix& obs, const RankGrid& grid) {
  if (obs.dim() != grid.dim)
    throw DataError("observation dimension does not match grid dimension");
  if (obs.n() != grid.size())
    throw DataError("observation count does not match grid size");
  const int n = obs.n();
  const int d = obs.dim();
  Eigen::MatrixXd cost(n, n);
  parallel_chunks(n, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
          const double diff = obs.values(i, k) - grid.points(j, k);
          s += diff * diff;
        }
        cost(i, j) = s;
      }
    }
  });
  return cost;
}

/// Optimal coupling between observations and grid points: permutation sigma
/// minimizing Sum_i ||y_i - u_sigma(i)||^2, with its cost and the grid it
/// refers to.
struct VectorRankAssignment {
  std::vector<int> permutation;
  double cost = 0.0;
  RankGrid grid;

  /// Recomputes the cost from raw inputs; must agree with `cost` to 1e-9.
  double recompute_cost(const ObservationMatrix& obs) const {
    double s = 0.0;
    for (int i = 0; i < obs.n(); ++i) {
      const auto diff =
          obs.values.row(i) - grid.points.row(permutation[static_cast<std::size_t>(i)]);
      s += diff.squaredNorm();
    }
    return s;
  }
};

/// Solves the empirical vector-rank assignment for the given grid.
///
/// The search runs on centered observations divided by one positive scale:
/// per-column shifts and a common scale cancel out of the argmin, so the
/// permutation is unchanged, but the cost matrix stays well conditioned when
/// the data sits far from the unit cube (index levels, basis points). The
/// reported cost refers to the raw observations.
inline VectorRankAssignment assign_vector_ranks(const ObservationMatrix& obs,
                                                const RankGrid& grid) {
  ObservationMatrix search;
  search.values = obs.values.rowwise() - obs.values.colwise().mean();
  const double scale = search.values.cwiseAbs().maxCoeff();
  if (scale > 0.0) search.values /= scale;
  const Eigen::MatrixXd cost = squared_cost_matrix(search, grid);
  AssignmentResult sol = solve_assignment(cost);
  VectorRankAssignment out;
  out.permutation = std::move(sol.row_to_col);
  out.grid = grid;
  out.cost = out.recompute_cost(obs);
  return out;
}

/// Empirical vector ranks: row i is the grid point matched to observation i
/// under the optimal assignment. The output rows are a permutation of the
/// grid points.
inline Eigen::MatrixXd empirical_vector_ranks(const ObservationMatrix& obs,
                                              const RankGrid& grid) {
  const VectorRankAssignment a = assign_vector_ranks(obs, grid);
  Eigen::MatrixXd ranks(obs.n(), grid.dim);
  for (int i = 0; i < obs.n(); ++i)
    ranks.row(i) = grid.points.row(a.permutation[static_cast<std::size_t>(i)]);
  return ranks;
}

}  // namespace vcop
