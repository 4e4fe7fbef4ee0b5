#include "vcop/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "vcop/rng.hpp"

namespace {

using namespace vcop;

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

TEST(Assignment, TwoByTwoDiagonalCases) {
  const auto id_case = solve_assignment(mat2(0, 2, 2, 0));
  EXPECT_EQ(id_case.row_to_col, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(id_case.cost, 0.0);

  const auto swap_case = solve_assignment(mat2(2, 0, 0, 2));
  EXPECT_EQ(swap_case.row_to_col, (std::vector<int>{1, 0}));
  EXPECT_DOUBLE_EQ(swap_case.cost, 0.0);
}

TEST(Assignment, OneByOne) {
  Eigen::MatrixXd m(1, 1);
  m << 3.5;
  const auto r = solve_assignment(m);
  EXPECT_EQ(r.row_to_col, std::vector<int>{0});
  EXPECT_DOUBLE_EQ(r.cost, 3.5);
  EXPECT_EQ(brute_force_assignment(m).row_to_col, std::vector<int>{0});
}

TEST(Assignment, SixBySixMatchesBruteForce) {
  Rng rng(101);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXd m(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) m(i, j) = rng.uniform();
    const auto fast = solve_assignment(m);
    const auto slow = brute_force_assignment(m);
    EXPECT_NEAR(fast.cost, slow.cost, 1e-9);
  }
}

TEST(Assignment, RandomInstancesMatchOracle) {
  Rng rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 8);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = 10.0 * rng.uniform();
    const auto fast = solve_assignment(m);
    const auto slow = brute_force_assignment(m);
    EXPECT_NEAR(fast.cost, slow.cost, 1e-9) << "n=" << n << " rep=" << rep;
    // Output is a permutation.
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (int j : fast.row_to_col) seen[static_cast<std::size_t>(j)]++;
    for (int count : seen) EXPECT_EQ(count, 1);
  }
}

TEST(Assignment, LexicographicTieBreakOnConstantMatrix) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  const auto r = solve_assignment(m);
  EXPECT_EQ(r.row_to_col, (std::vector<int>{0, 1, 2, 3}));
  Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(5, 5, 2.5);
  EXPECT_EQ(solve_assignment(ones).row_to_col, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(Assignment, LexicographicTieBreakMatchesOracleOnQuantizedCosts) {
  // Coarsely quantized entries force many equal-cost optima; the solver and
  // the oracle must agree on the full permutation, not just the cost.
  Rng rng(55);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 6);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = 0.25 * static_cast<double>(rng.next_u64() % 3);
    const auto fast = solve_assignment(m);
    const auto slow = brute_force_assignment(m);
    EXPECT_NEAR(fast.cost, slow.cost, 1e-12);
    EXPECT_EQ(fast.row_to_col, slow.row_to_col) << "n=" << n << " rep=" << rep;
  }
}

TEST(Assignment, DuplicateRowsAreAccepted) {
  Eigen::MatrixXd m(3, 3);
  m << 1, 2, 3,
       1, 2, 3,
       0, 5, 5;
  const auto fast = solve_assignment(m);
  const auto slow = brute_force_assignment(m);
  EXPECT_NEAR(fast.cost, slow.cost, 1e-12);
  EXPECT_EQ(fast.row_to_col, slow.row_to_col);
}

TEST(Assignment, DeterministicAcrossCalls) {
  Rng rng(7);
  Eigen::MatrixXd m(40, 40);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) m(i, j) = rng.uniform();
  const auto a = solve_assignment(m);
  const auto b = solve_assignment(m);
  EXPECT_EQ(a.row_to_col, b.row_to_col);
  EXPECT_DOUBLE_EQ(a.cost, b.cost);
}

TEST(Assignment, RejectsMalformedInput) {
  Eigen::MatrixXd rect(2, 3);
  rect.setZero();
  EXPECT_THROW(solve_assignment(rect), DataError);

  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(solve_assignment(bad), DataError);
  bad(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(solve_assignment(bad), DataError);

  EXPECT_THROW(brute_force_assignment(Eigen::MatrixXd::Zero(11, 11)), ConfigError);
}

}  // namespace
