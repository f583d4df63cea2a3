#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cordet/permutation.hpp"

namespace cordet {

/// Optimal assignment together with an LP dual certificate:
/// row_dual(i) + col_dual(j) >= score(i,j) for all (i,j), with equality on
/// the chosen pairs, and sum(row_dual) + sum(col_dual) == value.
struct AssignmentResult {
  Permutation assignment;  // assignment[i] = column matched to row i
  double value = 0.0;
  Eigen::VectorXd row_dual;
  Eigen::VectorXd col_dual;
};

/// Maximizes sum_i score(i, sigma(i)) over permutations.
///
/// Shortest augmenting path Hungarian method with potentials, O(n^3).
/// Columns are scanned in increasing index order and only strict
/// improvements are taken, so ties resolve to the lowest index.
template <typename Derived>
AssignmentResult solve_assignment(const Eigen::MatrixBase<Derived>& score) {
  const Eigen::Index n = score.rows();
  if (score.cols() != n) {
    throw std::invalid_argument("solve_assignment: score matrix must be square");
  }
  if (!score.derived().allFinite()) {
    throw std::invalid_argument("solve_assignment: score matrix has non-finite entries");
  }
  const Eigen::MatrixXd cost = -score.template cast<double>();
  const double inf = std::numeric_limits<double>::infinity();

  // 1-based working arrays; index 0 is the virtual source row/column.
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<Eigen::Index> row_of(n + 1, 0);
  std::vector<Eigen::Index> way(n + 1, 0);
  std::vector<double> min_slack(n + 1);
  std::vector<char> used(n + 1);

  for (Eigen::Index i = 1; i <= n; ++i) {
    row_of[0] = i;
    Eigen::Index col = 0;
    std::fill(min_slack.begin(), min_slack.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col] = 1;
      const Eigen::Index row = row_of[col];
      double delta = inf;
      Eigen::Index next = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) {
          continue;
        }
        const double slack = cost(row - 1, j - 1) - u[row] - v[j];
        if (slack < min_slack[j]) {
          min_slack[j] = slack;
          way[j] = col;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          next = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      col = next;
    } while (row_of[col] != 0);
    do {
      const Eigen::Index prev = way[col];
      row_of[col] = row_of[prev];
      col = prev;
    } while (col != 0);
  }

  std::vector<std::size_t> map(static_cast<std::size_t>(n));
  for (Eigen::Index j = 1; j <= n; ++j) {
    map[static_cast<std::size_t>(row_of[j] - 1)] = static_cast<std::size_t>(j - 1);
  }

  AssignmentResult result;
  result.assignment = Permutation(std::move(map));
  result.row_dual.resize(n);
  result.col_dual.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    result.row_dual(i) = -u[i + 1];
    result.col_dual(i) = -v[i + 1];
    result.value += static_cast<double>(
        score(i, static_cast<Eigen::Index>(result.assignment[static_cast<std::size_t>(i)])));
  }
  return result;
}

/// Exhaustive maximization over all n! permutations (n <= 9). Returns the
/// best value and the lexicographically first permutation attaining it.
template <typename Derived>
std::pair<Permutation, double> assignment_bruteforce(const Eigen::MatrixBase<Derived>& score) {
  const Eigen::Index n = score.rows();
  if (score.cols() != n || n > 9) {
    throw std::invalid_argument("assignment_bruteforce: requires a square matrix with n <= 9");
  }
  std::vector<std::size_t> map(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < map.size(); ++i) {
    map[i] = i;
  }
  std::vector<std::size_t> best = map;
  double best_value = -std::numeric_limits<double>::infinity();
  do {
    double value = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      value += static_cast<double>(score(i, static_cast<Eigen::Index>(map[i])));
    }
    if (value > best_value) {
      best_value = value;
      best = map;
    }
  } while (std::next_permutation(map.begin(), map.end()));
  return {Permutation(std::move(best)), best_value};
}

}  // namespace cordet
