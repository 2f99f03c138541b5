#pragma once

#include <vector>

#include "conestab/core.hpp"

namespace conestab {

/// A bijection rows -> columns for the squared Euclidean cost between the
/// rows of X (sources) and the rows of Y (targets).
struct Assignment {
  std::vector<int> col_for_row;
  double cost = 0.0;        // sum of c(i, col_for_row[i])
  double dual_bound = 0.0;  // a lower bound on the optimal cost
  double gap() const { return cost - dual_bound; }
  bool exact = true;
  int iterations = 0;
};

inline constexpr int kMaxExactAssignment = 5000;

/// Minimum-cost perfect matching by shortest augmenting paths with dual
/// potentials. Throws NumericalError above kMaxExactAssignment points.
Assignment solve_assignment(const Mat& X, const Mat& Y);

struct EntropicOptions {
  double epsilon = 0.0;  // 0 picks 1e-3 * diameter^2
  int max_iterations = 2000;
  double marginal_tol = 1e-6;
};

/// Log-domain Sinkhorn iterations followed by greedy rounding of the plan and
/// an exact repair of the rows left unmatched.
Assignment solve_entropic(const Mat& X, const Mat& Y, const EntropicOptions& options = {});

/// Squared Euclidean cost of a given bijection.
double assignment_cost(const Mat& X, const Mat& Y, const std::vector<int>& col_for_row);

}  // namespace conestab
