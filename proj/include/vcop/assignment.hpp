#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "vcop/common.hpp"

namespace vcop {

/// Minimum-cost perfect matching: row_to_col is a bijection on {0,...,n-1}
/// and cost is the sum of the matched entries.
struct AssignmentResult {
  std::vector<int> row_to_col;
  double cost = 0.0;
};

namespace detail {

/// Dijkstra shortest-augmenting-path phase: matches every row listed in
/// free_rows while keeping the duals v feasible. Exact for any starting v
/// whose matched edges are row-tight, so it can finish from a cold start,
/// from column-reduction duals, or from auction prices.
inline void sap_augment(int n, const std::vector<double>& c, const std::vector<int>& free_rows,
                        int numfree, std::vector<int>& rowsol, std::vector<int>& colsol,
                        std::vector<double>& v) {
  std::vector<int> collist(static_cast<std::size_t>(n));
  std::vector<int> pred(static_cast<std::size_t>(n));
  std::vector<double> d(static_cast<std::size_t>(n));
  const auto at = [&](int i, int j) -> double {
    return c[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(j)];
  };
  for (int f = 0; f < numfree; ++f) {
    const int freerow = free_rows[static_cast<std::size_t>(f)];
    for (int j = 0; j < n; ++j) {
      d[static_cast<std::size_t>(j)] = at(freerow, j) - v[static_cast<std::size_t>(j)];
      pred[static_cast<std::size_t>(j)] = freerow;
      collist[static_cast<std::size_t>(j)] = j;
    }
    int low = 0, up = 0, last = -1, endofpath = -1;
    double minval = 0.0;
    bool found = false;
    do {
      if (up == low) {
        last = low - 1;
        minval = d[static_cast<std::size_t>(collist[static_cast<std::size_t>(up)])];
        ++up;
        for (int k = up; k < n; ++k) {
          const int j = collist[static_cast<std::size_t>(k)];
          const double h = d[static_cast<std::size_t>(j)];
          if (h <= minval) {
            if (h < minval) {
              up = low;
              minval = h;
            }
            collist[static_cast<std::size_t>(k)] = collist[static_cast<std::size_t>(up)];
            collist[static_cast<std::size_t>(up++)] = j;
          }
        }
        for (int k = low; k < up; ++k) {
          const int j = collist[static_cast<std::size_t>(k)];
          if (colsol[static_cast<std::size_t>(j)] < 0) {
            endofpath = j;
            found = true;
            break;
          }
        }
      }
      if (!found) {
        const int j1 = collist[static_cast<std::size_t>(low)];
        ++low;
        const int i = colsol[static_cast<std::size_t>(j1)];
        const double h = at(i, j1) - v[static_cast<std::size_t>(j1)] - minval;
        for (int k = up; k < n; ++k) {
          const int j = collist[static_cast<std::size_t>(k)];
          const double v2 = at(i, j) - v[static_cast<std::size_t>(j)] - h;
          if (v2 < d[static_cast<std::size_t>(j)]) {
            pred[static_cast<std::size_t>(j)] = i;
            if (v2 == minval) {
              if (colsol[static_cast<std::size_t>(j)] < 0) {
                endofpath = j;
                found = true;
                break;
              }
              collist[static_cast<std::size_t>(k)] = collist[static_cast<std::size_t>(up)];
              collist[static_cast<std::size_t>(up++)] = j;
            }
            d[static_cast<std::size_t>(j)] = v2;
          }
        }
      }
    } while (!found);
    for (int k = 0; k <= last; ++k) {
      const int j1 = collist[static_cast<std::size_t>(k)];
      v[static_cast<std::size_t>(j1)] += d[static_cast<std::size_t>(j1)] - minval;
    }
    int i = -1;
    do {
      i = pred[static_cast<std::size_t>(endofpath)];
      colsol[static_cast<std::size_t>(endofpath)] = i;
      const int j1 = rowsol[static_cast<std::size_t>(i)];
      rowsol[static_cast<std::size_t>(i)] = endofpath;
      endofpath = j1;
    } while (i != freerow);
  }
}

/// Gauss-Seidel auction with epsilon scaling: repeatedly lets each unmatched
/// row bid for its cheapest column at price v, raising that column's price by
/// the bid gap plus epsilon. Terminates with near-optimal prices (written to
/// v as column discounts) and a complete epsilon-optimal matching (rowmatch).
/// Bids per round are capped so degenerate price wars abort the round early;
/// prices stay valid duals either way.
inline void auction_prices(int n, const std::vector<double>& c, double spread,
                           std::vector<double>& v, std::vector<int>& rowmatch) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> price(static_cast<std::size_t>(n), 0.0);
  std::vector<int> owner(static_cast<std::size_t>(n));
  std::vector<int> stack(static_cast<std::size_t>(n));
  rowmatch.assign(static_cast<std::size_t>(n), -1);
  double eps = spread / 8.0;
  const double eps_stop = spread * 1e-4 / n;
  const long long bid_cap = 30LL * n;
  while (true) {
    std::fill(owner.begin(), owner.end(), -1);
    std::fill(rowmatch.begin(), rowmatch.end(), -1);
    int top = 0;
    long long bids = 0;
    bool aborted = false;
    for (int i = n - 1; i >= 0; --i) stack[static_cast<std::size_t>(top++)] = i;
    while (top > 0) {
      if (++bids > bid_cap) {
        aborted = true;
        break;
      }
      const int i = stack[static_cast<std::size_t>(--top)];
      const double* row = &c[static_cast<std::size_t>(i) * static_cast<std::size_t>(n)];
      double best = kInf, second = kInf;
      int j1 = -1;
      for (int j = 0; j < n; ++j) {
        const double h = row[j] + price[static_cast<std::size_t>(j)];
        if (h < second) {
          if (h < best) {
            second = best;
            best = h;
            j1 = j;
          } else {
            second = h;
          }
        }
      }
      price[static_cast<std::size_t>(j1)] += (second - best) + eps;
      const int prev = owner[static_cast<std::size_t>(j1)];
      owner[static_cast<std::size_t>(j1)] = i;
      rowmatch[static_cast<std::size_t>(i)] = j1;
      if (prev >= 0) {
        rowmatch[static_cast<std::size_t>(prev)] = -1;
        stack[static_cast<std::size_t>(top++)] = prev;
      }
    }
    if (aborted || eps <= eps_stop) break;
    eps = std::max(eps / 8.0, eps_stop);
  }
  for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = -price[static_cast<std::size_t>(j)];
}

/// Jonker-Volgenant solver on a dense square cost matrix (row-major flat
/// storage). Produces an optimal primal assignment (rowsol/colsol) and dual
/// prices (u, v) with nonnegative reduced costs up to floating-point
/// rounding. Large instances get an auction warm start because the classic
/// reduction heuristics livelock on real-valued geometric costs; the exact
/// shortest-augmenting-path finish certifies optimality in both regimes.
inline void jv_solve(int n, const std::vector<double>& c, std::vector<int>& rowsol,
                     std::vector<int>& colsol, std::vector<double>& u,
                     std::vector<double>& v) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr int kAuctionMinSize = 512;
  rowsol.assign(static_cast<std::size_t>(n), -1);
  colsol.assign(static_cast<std::size_t>(n), -1);
  u.assign(static_cast<std::size_t>(n), 0.0);
  v.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<int> free_rows(static_cast<std::size_t>(n));
  int numfree = 0;
  const auto at = [&](int i, int j) -> double {
    return c[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(j)];
  };

  double cmin = kInf, cmax = -kInf;
  for (const double x : c) {
    cmin = std::min(cmin, x);
    cmax = std::max(cmax, x);
  }

  if (n >= kAuctionMinSize && cmax > cmin) {
    // Auction prices, then keep only matches that are exactly row-tight so the
    // augmenting phase starts from feasible duals.
    std::vector<int> rowmatch;
    auction_prices(n, c, cmax - cmin, v, rowmatch);
    for (int i = 0; i < n; ++i) {
      const double* row = &c[static_cast<std::size_t>(i) * static_cast<std::size_t>(n)];
      double rowmin = kInf;
      for (int j = 0; j < n; ++j) rowmin = std::min(rowmin, row[j] - v[static_cast<std::size_t>(j)]);
      const int jm = rowmatch[static_cast<std::size_t>(i)];
      if (jm >= 0 && row[jm] - v[static_cast<std::size_t>(jm)] == rowmin &&
          colsol[static_cast<std::size_t>(jm)] < 0) {
        rowsol[static_cast<std::size_t>(i)] = jm;
        colsol[static_cast<std::size_t>(jm)] = i;
      } else {
        free_rows[static_cast<std::size_t>(numfree++)] = i;
      }
    }
  } else {
    // Column reduction, scanning columns in reverse so low-index rows win ties.
    std::vector<int> matches(static_cast<std::size_t>(n), 0);
    for (int j = n - 1; j >= 0; --j) {
      double minval = at(0, j);
      int imin = 0;
      for (int i = 1; i < n; ++i) {
        const double h = at(i, j);
        if (h < minval) {
          minval = h;
          imin = i;
        }
      }
      v[static_cast<std::size_t>(j)] = minval;
      if (++matches[static_cast<std::size_t>(imin)] == 1) {
        rowsol[static_cast<std::size_t>(imin)] = j;
        colsol[static_cast<std::size_t>(j)] = imin;
      }
    }

    // Reduction transfer from single-assigned rows.
    for (int i = 0; i < n; ++i) {
      if (matches[static_cast<std::size_t>(i)] == 0) {
        free_rows[static_cast<std::size_t>(numfree++)] = i;
      } else if (matches[static_cast<std::size_t>(i)] == 1) {
        const int j1 = rowsol[static_cast<std::size_t>(i)];
        double minval = kInf;
        for (int j = 0; j < n; ++j)
          if (j != j1) minval = std::min(minval, at(i, j) - v[static_cast<std::size_t>(j)]);
        if (minval < kInf) v[static_cast<std::size_t>(j1)] -= minval;
      }
    }

    // Augmenting row reduction, two passes. Iterations are capped because the
    // dual ping-pong on tied real-valued costs can otherwise stall; surviving
    // rows simply fall through to the exact augmenting phase.
    for (int loop = 0; loop < 2; ++loop) {
      const long long iter_cap = 2LL * n;
      long long iters = 0;
      int k = 0;
      const int prvnumfree = numfree;
      numfree = 0;
      while (k < prvnumfree) {
        if (++iters > iter_cap) {
          while (k < prvnumfree)
            free_rows[static_cast<std::size_t>(numfree++)] =
                free_rows[static_cast<std::size_t>(k++)];
          break;
        }
        const int i = free_rows[static_cast<std::size_t>(k++)];
        double umin = at(i, 0) - v[0];
        int j1 = 0;
        double usubmin = kInf;
        int j2 = -1;
        for (int j = 1; j < n; ++j) {
          const double h = at(i, j) - v[static_cast<std::size_t>(j)];
          if (h < usubmin) {
            if (h >= umin) {
              usubmin = h;
              j2 = j;
            } else {
              usubmin = umin;
              j2 = j1;
              umin = h;
              j1 = j;
            }
          }
        }
        int i0 = colsol[static_cast<std::size_t>(j1)];
        if (umin < usubmin) {
          v[static_cast<std::size_t>(j1)] -= usubmin - umin;
        } else if (i0 >= 0 && j2 >= 0) {
          j1 = j2;
          i0 = colsol[static_cast<std::size_t>(j1)];
        }
        rowsol[static_cast<std::size_t>(i)] = j1;
        colsol[static_cast<std::size_t>(j1)] = i;
        if (i0 >= 0) {
          if (umin < usubmin)
            free_rows[static_cast<std::size_t>(--k)] = i0;
          else
            free_rows[static_cast<std::size_t>(numfree++)] = i0;
        }
      }
    }
  }

  sap_augment(n, c, free_rows, numfree, rowsol, colsol, v);

  for (int i = 0; i < n; ++i) {
    const int j = rowsol[static_cast<std::size_t>(i)];
    u[static_cast<std::size_t>(i)] = at(i, j) - v[static_cast<std::size_t>(j)];
  }
}

/// Rewires an optimal assignment to the lexicographically smallest optimal
/// permutation. Complementary slackness confines every optimal assignment to
/// the tight-edge graph of the optimal duals, so rows are greedily matched to
/// the smallest tight column that keeps the remainder perfectly matchable
/// (checked by augmenting-path repair). No-op when the optimum is unique.
inline void lex_refine(int n, const std::vector<double>& c, std::vector<int>& rowsol,
                       std::vector<int>& colsol, const std::vector<double>& u,
                       const std::vector<double>& v) {
  const auto at = [&](int i, int j) -> double {
    return c[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(j)];
  };
  double scale = 0.0;
  for (double x : c) scale = std::max(scale, std::abs(x));
  const double tol = 1e-10 * (1.0 + scale);

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  bool has_choice = false;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (at(i, j) - u[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)] <= tol)
        adj[static_cast<std::size_t>(i)].push_back(j);
    if (adj[static_cast<std::size_t>(i)].size() != 1) has_choice = true;
  }
  if (!has_choice) return;

  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  std::vector<char> visited(static_cast<std::size_t>(n), 0);

  // Kuhn augmenting search; mutates the matching only along a successful path.
  auto try_augment = [&](auto&& self, int row) -> bool {
    for (int j : adj[static_cast<std::size_t>(row)]) {
      if (fixed[static_cast<std::size_t>(j)] || visited[static_cast<std::size_t>(j)]) continue;
      visited[static_cast<std::size_t>(j)] = 1;
      const int owner = colsol[static_cast<std::size_t>(j)];
      if (owner < 0 || self(self, owner)) {
        colsol[static_cast<std::size_t>(j)] = row;
        rowsol[static_cast<std::size_t>(row)] = j;
        return true;
      }
    }
    return false;
  };

  for (int i = 0; i < n; ++i) {
    for (int j : adj[static_cast<std::size_t>(i)]) {
      if (fixed[static_cast<std::size_t>(j)]) continue;
      if (rowsol[static_cast<std::size_t>(i)] == j) break;  // already the best available
      const int owner = colsol[static_cast<std::size_t>(j)];
      const int old_col = rowsol[static_cast<std::size_t>(i)];
      colsol[static_cast<std::size_t>(j)] = i;
      rowsol[static_cast<std::size_t>(i)] = j;
      colsol[static_cast<std::size_t>(old_col)] = -1;
      std::fill(visited.begin(), visited.end(), 0);
      visited[static_cast<std::size_t>(j)] = 1;
      if (owner < 0 || try_augment(try_augment, owner)) break;
      colsol[static_cast<std::size_t>(old_col)] = i;  // revert
      colsol[static_cast<std::size_t>(j)] = owner;
      rowsol[static_cast<std::size_t>(i)] = old_col;
    }
    fixed[static_cast<std::size_t>(rowsol[static_cast<std::size_t>(i)])] = 1;
  }
}

inline std::vector<double> flatten_checked(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols() || cost.rows() < 1)
    throw DataError("assignment requires a nonempty square cost matrix");
  const int n = static_cast<int>(cost.rows());
  std::vector<double> c(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = cost(i, j);
      if (!std::isfinite(x)) throw DataError("assignment cost matrix has non-finite entries");
      c[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
        static_cast<std::size_t>(j)] = x;
    }
  }
  return c;
}

}  // namespace detail

/// Exact solution of min_sigma Sum_i cost(i, sigma(i)) over permutations.
/// Deterministic: among equal-cost optima, returns the lexicographically
/// smallest permutation.
inline AssignmentResult solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const auto c = detail::flatten_checked(cost);
  std::vector<int> rowsol, colsol;
  std::vector<double> u, v;
  detail::jv_solve(n, c, rowsol, colsol, u, v);
  detail::lex_refine(n, c, rowsol, colsol, u, v);
  AssignmentResult result;
  result.row_to_col = std::move(rowsol);
  result.cost = 0.0;
  for (int i = 0; i < n; ++i)
    result.cost += cost(i, result.row_to_col[static_cast<std::size_t>(i)]);
  return result;
}

/// Exhaustive-minimum oracle, usable up to n = 10. Enumerates permutations in
/// lexicographic order and keeps the first strict minimum, matching
/// solve_assignment's tie-break.
inline AssignmentResult brute_force_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.rows() != cost.cols() || n < 1)
    throw DataError("assignment requires a nonempty square cost matrix");
  if (n > 10) throw ConfigError("brute-force assignment oracle is limited to n <= 10");
  static_cast<void>(detail::flatten_checked(cost));

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  AssignmentResult best;
  best.cost = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
    if (total < best.cost) {
      best.cost = total;
      best.row_to_col = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace vcop
